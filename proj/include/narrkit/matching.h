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

#ifndef NARRKIT_MATCHING_H_
#define NARRKIT_MATCHING_H_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "narrkit/manifest.h"

namespace narrkit {

// Thresholds of the temporal caption/action matching rule. A pair matches
// under rule A when the start times differ by less than max_start_diff_s, the
// clip ends strictly after the action, and IoU exceeds iou_low; it matches
// under rule B when IoU exceeds iou_high. All comparisons are strict.
//
// The prose description of the rule uses 0.25 for iou_low while the reference
// pseudo code uses 0.2; the default follows the pseudo code.
struct MatchThresholds {
  double max_start_diff_s = 5.0;
  double iou_low = 0.2;
  double iou_high = 0.5;

  // Throws DataError unless 0 <= iou_low <= iou_high <= 1 and
  // max_start_diff_s >= 0.
  void Validate() const;
};

enum class MatchRule { kRuleA, kRuleB };

const char* MatchRuleName(MatchRule rule);

struct MatchDecision {
  double iou = 0.0;
  double start_diff_s = 0.0;
  MatchRule rule = MatchRule::kRuleB;
};

struct MatchRecord {
  std::string video_id;
  std::string clip_id;
  std::size_t action_index = 0;
  double iou = 0.0;
  double start_diff_s = 0.0;
  MatchRule rule = MatchRule::kRuleB;

  friend bool operator==(const MatchRecord&, const MatchRecord&) = default;
};

// Intersection over the hull span max(e1, e2) - min(s1, s2). For disjoint
// intervals this is smaller than the set union, so IoU is still 0 there.
// Returns 0 when the hull span is not positive.
double IntervalIoU(const TimeInterval& a, const TimeInterval& b);

// Evaluates both rules for one pair. Rule B wins when both fire. Throws
// DataError if the records belong to different videos.
std::optional<MatchDecision> MatchClipAction(const ClipRecord& clip,
                                             const ActionRecord& action,
                                             const MatchThresholds& thresholds);

// Matches every clip against every action of the same video. The output is
// ordered by (video_id, clip position, action_index) regardless of the
// number of worker threads.
std::vector<MatchRecord> MatchDataset(const DatasetManifest& manifest,
                                      const MatchThresholds& thresholds,
                                      int threads = 1);

enum class FilterPolicy { kKeepAll, kBestPerClip };

struct FilterResult {
  // Clips without any match are removed; so are videos left without clips,
  // along with their actions.
  DatasetManifest manifest;
  // (video_id, clip_id) -> matched action indices. Under kBestPerClip each
  // list holds exactly one index; under kKeepAll the indices are ascending.
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>>
      assignment;
};

// Throws DataError if a match names a clip or action index that is not in
// the manifest.
FilterResult FilterMatched(const DatasetManifest& manifest,
                           const std::vector<MatchRecord>& matches,
                           FilterPolicy policy);

std::size_t WriteMatches(const std::vector<MatchRecord>& matches,
                         std::ostream& out);
std::vector<MatchRecord> ParseMatches(std::istream& in);

}  // namespace narrkit

#endif  // NARRKIT_MATCHING_H_
