/*
 * Copyright 2026 The narrkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef NARRKIT_MANIFEST_H_
#define NARRKIT_MANIFEST_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace narrkit {

// Half-open time span in seconds, relative to the start of its video.
struct TimeInterval {
  double start_s = 0.0;
  double end_s = 0.0;

  double length() const { return end_s - start_s; }
  bool valid() const;

  friend bool operator==(const TimeInterval&, const TimeInterval&) = default;
};

// A captioned, scene-cut segment of a video.
struct ClipRecord {
  std::string video_id;
  std::string clip_id;
  TimeInterval interval;
  std::string caption;
  // Externally supplied token count for the caption, if any.
  std::optional<std::int64_t> tokens;

  friend bool operator==(const ClipRecord&, const ClipRecord&) = default;
};

// A time-stamped procedural step taken from ASR narration.
struct ActionRecord {
  std::string video_id;
  TimeInterval interval;
  std::string description;
  std::optional<std::int64_t> tokens;

  friend bool operator==(const ActionRecord&, const ActionRecord&) = default;
};

struct VideoEntry {
  std::optional<double> duration_s;
  // Ordered by (start_s, end_s, clip_id).
  std::vector<ClipRecord> clips;

  friend bool operator==(const VideoEntry&, const VideoEntry&) = default;
};

enum class SplitTag { kTrain, kVal };

const char* SplitTagName(SplitTag tag);

struct DatasetManifest {
  std::map<std::string, VideoEntry> videos;
  // Ordered by (start_s, end_s, description). An action's position in this
  // list is its action_index.
  std::map<std::string, std::vector<ActionRecord>> actions;
  std::optional<SplitTag> split_tag;

  std::size_t clip_count() const;
  std::size_t action_count() const;

  // Restores the canonical clip and action order of every video.
  void SortRecords();

  friend bool operator==(const DatasetManifest&,
                         const DatasetManifest&) = default;
};

struct Violation {
  enum class Kind {
    kInvalidInterval,
    kClipOutsideDuration,
    kInvalidDuration,
    kDuplicateClipId,
    kEmptyCaption,
    kEmptyDescription,
    kClipsUnordered,
    kVideoIdMismatch,
  };

  Kind kind;
  std::string video_id;
  // Set when the violation concerns a single clip.
  std::optional<std::string> clip_id;
  // Set when the violation concerns an action.
  std::optional<std::size_t> action_index;
  std::string message;
};

const char* ViolationKindName(Violation::Kind kind);

// Reads a line-delimited manifest. Record kinds may appear in any order;
// blank lines are skipped. Throws ParseError (with line number and field) on
// malformed records, invalid intervals, or duplicate clip ids.
DatasetManifest ParseManifest(std::istream& in);
DatasetManifest ReadManifestFile(const std::string& path);

// Collects every invariant breach. An empty result means the manifest is
// well-formed.
std::vector<Violation> ValidateManifest(const DatasetManifest& manifest);

struct ManifestSplit {
  DatasetManifest train;
  DatasetManifest val;
};

// Moves the videos named in val_ids (and their actions) into the val
// manifest. Throws DataError listing every id absent from the manifest.
ManifestSplit Partition(const DatasetManifest& manifest,
                        const std::set<std::string>& val_ids);

// Writes a header record followed by one record per video, clip and action.
// Returns the number of bytes written; throws IoError if the sink fails.
std::size_t WriteManifest(const DatasetManifest& manifest, std::ostream& out);
std::size_t WriteManifestFile(const DatasetManifest& manifest,
                              const std::string& path);

}  // namespace narrkit

#endif  // NARRKIT_MANIFEST_H_
