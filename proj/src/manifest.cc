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

#include "narrkit/manifest.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "json_lines.h"

namespace narrkit {
namespace {

using internal::Json;

constexpr int kManifestVersion = 1;

bool ClipLess(const ClipRecord& a, const ClipRecord& b) {
  return std::tie(a.interval.start_s, a.interval.end_s, a.clip_id) <
         std::tie(b.interval.start_s, b.interval.end_s, b.clip_id);
}

bool ActionLess(const ActionRecord& a, const ActionRecord& b) {
  return std::tie(a.interval.start_s, a.interval.end_s, a.description) <
         std::tie(b.interval.start_s, b.interval.end_s, b.description);
}

bool IsBlank(const std::string& text) {
  return text.find_first_not_of(" \t\r\n\f\v") == std::string::npos;
}

std::string DescribeInterval(const TimeInterval& interval) {
  std::ostringstream os;
  os << "[" << interval.start_s << ", " << interval.end_s << "]";
  return os.str();
}

TimeInterval ReadInterval(const Json& record, std::size_t line) {
  return {internal::RequireNumber(record, "start_s", line),
          internal::RequireNumber(record, "end_s", line)};
}

SplitTag ParseSplit(const Json& record, std::size_t line) {
  std::string name = internal::RequireString(record, "split", line);
  if (name == "train") return SplitTag::kTrain;
  if (name == "val") return SplitTag::kVal;
  throw ParseError(line, "split", "expected \"train\" or \"val\"");
}

}  // namespace

bool TimeInterval::valid() const {
  return std::isfinite(start_s) && std::isfinite(end_s) && start_s >= 0.0 &&
         end_s > start_s;
}

const char* SplitTagName(SplitTag tag) {
  return tag == SplitTag::kTrain ? "train" : "val";
}

std::size_t DatasetManifest::clip_count() const {
  std::size_t n = 0;
  for (const auto& [id, video] : videos) n += video.clips.size();
  return n;
}

std::size_t DatasetManifest::action_count() const {
  std::size_t n = 0;
  for (const auto& [id, list] : actions) n += list.size();
  return n;
}

void DatasetManifest::SortRecords() {
  for (auto& [id, video] : videos) {
    std::stable_sort(video.clips.begin(), video.clips.end(), ClipLess);
  }
  for (auto& [id, list] : actions) {
    std::stable_sort(list.begin(), list.end(), ActionLess);
  }
}

const char* ViolationKindName(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::kInvalidInterval:
      return "invalid_interval";
    case Violation::Kind::kClipOutsideDuration:
      return "clip_outside_duration";
    case Violation::Kind::kInvalidDuration:
      return "invalid_duration";
    case Violation::Kind::kDuplicateClipId:
      return "duplicate_clip_id";
    case Violation::Kind::kEmptyCaption:
      return "empty_caption";
    case Violation::Kind::kEmptyDescription:
      return "empty_description";
    case Violation::Kind::kClipsUnordered:
      return "clips_unordered";
    case Violation::Kind::kVideoIdMismatch:
      return "video_id_mismatch";
  }
  return "unknown";
}

DatasetManifest ParseManifest(std::istream& in) {
  DatasetManifest manifest;
  bool seen_header = false;
  std::map<std::string, std::size_t> video_record_line;
  std::map<std::pair<std::string, std::string>, std::size_t> clip_line;

  internal::ForEachJsonLine(in, [&](std::size_t line, const Json& record) {
    const std::string kind = internal::RequireString(record, "kind", line);
    if (kind == "manifest") {
      if (seen_header) throw ParseError(line, "kind", "second header record");
      seen_header = true;
      if (auto v = internal::OptionalInteger(record, "version", line);
          v && *v != kManifestVersion) {
        throw ParseError(line, "version", "unsupported manifest version");
      }
      if (record.contains("split") && !record["split"].is_null()) {
        manifest.split_tag = ParseSplit(record, line);
      }
      return;
    }

    const std::string video_id =
        internal::RequireString(record, "video_id", line);
    if (video_id.empty()) throw ParseError(line, "video_id", "empty");

    if (kind == "video") {
      auto [it, inserted] = video_record_line.emplace(video_id, line);
      if (!inserted) {
        throw ParseError(line, "video_id",
                         "duplicate video record '" + video_id +
                             "' (first seen on line " +
                             std::to_string(it->second) + ")");
      }
      auto duration = internal::OptionalNumber(record, "duration_s", line);
      if (duration && *duration <= 0.0) {
        throw ParseError(line, "duration_s", "must be positive");
      }
      manifest.videos[video_id].duration_s = duration;
    } else if (kind == "clip") {
      ClipRecord clip;
      clip.video_id = video_id;
      clip.clip_id = internal::RequireString(record, "clip_id", line);
      if (clip.clip_id.empty()) throw ParseError(line, "clip_id", "empty");
      clip.interval = ReadInterval(record, line);
      clip.caption = internal::RequireString(record, "caption", line);
      clip.tokens = internal::OptionalInteger(record, "tokens", line);
      if (!clip.interval.valid()) {
        throw ParseError(line, "end_s",
                         "clip '" + clip.clip_id + "' has invalid interval " +
                             DescribeInterval(clip.interval));
      }
      if (IsBlank(clip.caption)) {
        throw ParseError(line, "caption",
                         "clip '" + clip.clip_id + "' has an empty caption");
      }
      auto [it, inserted] =
          clip_line.emplace(std::make_pair(video_id, clip.clip_id), line);
      if (!inserted) {
        throw ParseError(line, "clip_id",
                         "duplicate clip_id '" + clip.clip_id +
                             "' in video '" + video_id +
                             "' (first seen on line " +
                             std::to_string(it->second) + ")");
      }
      manifest.videos[video_id].clips.push_back(std::move(clip));
    } else if (kind == "action") {
      ActionRecord action;
      action.video_id = video_id;
      action.interval = ReadInterval(record, line);
      action.description = internal::RequireString(record, "description", line);
      action.tokens = internal::OptionalInteger(record, "tokens", line);
      if (!action.interval.valid()) {
        throw ParseError(line, "end_s",
                         "action has invalid interval " +
                             DescribeInterval(action.interval));
      }
      if (IsBlank(action.description)) {
        throw ParseError(line, "description", "empty");
      }
      manifest.actions[video_id].push_back(std::move(action));
    } else {
      throw ParseError(line, "kind", "unknown record kind '" + kind + "'");
    }
  });

  manifest.SortRecords();
  return manifest;
}

DatasetManifest ReadManifestFile(const std::string& path) {
  auto in = internal::OpenInput(path);
  return ParseManifest(in);
}

std::vector<Violation> ValidateManifest(const DatasetManifest& manifest) {
  using Kind = Violation::Kind;
  std::vector<Violation> violations;

  for (const auto& [video_id, video] : manifest.videos) {
    if (video.duration_s &&
        !(std::isfinite(*video.duration_s) && *video.duration_s > 0.0)) {
      violations.push_back({Kind::kInvalidDuration, video_id, std::nullopt,
                            std::nullopt, "duration must be positive"});
    }
    std::set<std::string> seen;
    for (std::size_t i = 0; i < video.clips.size(); ++i) {
      const ClipRecord& clip = video.clips[i];
      if (clip.video_id != video_id) {
        violations.push_back({Kind::kVideoIdMismatch, video_id, clip.clip_id,
                              std::nullopt,
                              "clip carries video_id '" + clip.video_id + "'"});
      }
      if (!seen.insert(clip.clip_id).second) {
        violations.push_back({Kind::kDuplicateClipId, video_id, clip.clip_id,
                              std::nullopt, "clip_id is not unique"});
      }
      if (!clip.interval.valid()) {
        violations.push_back({Kind::kInvalidInterval, video_id, clip.clip_id,
                              std::nullopt,
                              "invalid interval " +
                                  DescribeInterval(clip.interval)});
      } else if (video.duration_s && std::isfinite(*video.duration_s) &&
                 clip.interval.end_s > *video.duration_s) {
        violations.push_back(
            {Kind::kClipOutsideDuration, video_id, clip.clip_id, std::nullopt,
             "interval " + DescribeInterval(clip.interval) +
                 " exceeds duration " + std::to_string(*video.duration_s)});
      }
      if (IsBlank(clip.caption)) {
        violations.push_back({Kind::kEmptyCaption, video_id, clip.clip_id,
                              std::nullopt, "caption is empty"});
      }
      if (i > 0 && clip.interval.start_s < video.clips[i - 1].interval.start_s) {
        violations.push_back({Kind::kClipsUnordered, video_id, clip.clip_id,
                              std::nullopt, "clip starts before its predecessor"});
      }
    }
  }

  for (const auto& [video_id, list] : manifest.actions) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      const ActionRecord& action = list[i];
      if (action.video_id != video_id) {
        violations.push_back({Kind::kVideoIdMismatch, video_id, std::nullopt, i,
                              "action carries video_id '" + action.video_id +
                                  "'"});
      }
      if (!action.interval.valid()) {
        violations.push_back({Kind::kInvalidInterval, video_id, std::nullopt, i,
                              "invalid interval " +
                                  DescribeInterval(action.interval)});
      }
      if (IsBlank(action.description)) {
        violations.push_back({Kind::kEmptyDescription, video_id, std::nullopt,
                              i, "description is empty"});
      }
    }
  }
  return violations;
}

ManifestSplit Partition(const DatasetManifest& manifest,
                        const std::set<std::string>& val_ids) {
  std::string unknown;
  for (const auto& id : val_ids) {
    if (!manifest.videos.contains(id)) {
      unknown += unknown.empty() ? "'" + id + "'" : ", '" + id + "'";
    }
  }
  if (!unknown.empty()) {
    throw DataError("unknown video ids in validation set: " + unknown);
  }

  ManifestSplit split;
  split.train.split_tag = SplitTag::kTrain;
  split.val.split_tag = SplitTag::kVal;
  for (const auto& [id, video] : manifest.videos) {
    (val_ids.contains(id) ? split.val : split.train).videos.emplace(id, video);
  }
  for (const auto& [id, list] : manifest.actions) {
    (val_ids.contains(id) ? split.val : split.train).actions.emplace(id, list);
  }
  return split;
}

std::size_t WriteManifest(const DatasetManifest& manifest, std::ostream& out) {
  std::size_t bytes = 0;
  Json header = {{"kind", "manifest"}, {"version", kManifestVersion}};
  if (manifest.split_tag) header["split"] = SplitTagName(*manifest.split_tag);
  bytes += internal::WriteJsonLine(out, header);

  for (const auto& [video_id, video] : manifest.videos) {
    Json record = {{"kind", "video"}, {"video_id", video_id}};
    if (video.duration_s) record["duration_s"] = *video.duration_s;
    bytes += internal::WriteJsonLine(out, record);
    for (const ClipRecord& clip : video.clips) {
      Json c = {{"kind", "clip"},
                {"video_id", clip.video_id},
                {"clip_id", clip.clip_id},
                {"start_s", clip.interval.start_s},
                {"end_s", clip.interval.end_s},
                {"caption", clip.caption}};
      if (clip.tokens) c["tokens"] = *clip.tokens;
      bytes += internal::WriteJsonLine(out, c);
    }
  }
  for (const auto& [video_id, list] : manifest.actions) {
    for (const ActionRecord& action : list) {
      Json a = {{"kind", "action"},
                {"video_id", action.video_id},
                {"start_s", action.interval.start_s},
                {"end_s", action.interval.end_s},
                {"description", action.description}};
      if (action.tokens) a["tokens"] = *action.tokens;
      bytes += internal::WriteJsonLine(out, a);
    }
  }
  out.flush();
  if (!out) throw IoError("write failure");
  return bytes;
}

std::size_t WriteManifestFile(const DatasetManifest& manifest,
                              const std::string& path) {
  auto out = internal::OpenOutput(path);
  return WriteManifest(manifest, out);
}

}  // namespace narrkit
