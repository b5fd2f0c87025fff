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

#include "narrkit/matching.h"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "json_lines.h"
#include "parallel.h"

namespace narrkit {
namespace {

using internal::Json;

std::vector<MatchRecord> MatchVideo(const std::string& video_id,
                                    const VideoEntry& video,
                                    const std::vector<ActionRecord>& actions,
                                    const MatchThresholds& thresholds) {
  std::vector<MatchRecord> out;
  for (const ClipRecord& clip : video.clips) {
    for (std::size_t a = 0; a < actions.size(); ++a) {
      auto decision = MatchClipAction(clip, actions[a], thresholds);
      if (!decision) continue;
      out.push_back({video_id, clip.clip_id, a, decision->iou,
                     decision->start_diff_s, decision->rule});
    }
  }
  return out;
}

MatchRule ParseRule(const std::string& name, std::size_t line) {
  if (name == "RuleA") return MatchRule::kRuleA;
  if (name == "RuleB") return MatchRule::kRuleB;
  throw ParseError(line, "rule", "expected \"RuleA\" or \"RuleB\"");
}

}  // namespace

void MatchThresholds::Validate() const {
  if (!(std::isfinite(max_start_diff_s) && max_start_diff_s >= 0.0)) {
    throw DataError("max_start_diff_s must be a non-negative number");
  }
  if (!(0.0 <= iou_low && iou_low <= iou_high && iou_high <= 1.0)) {
    throw DataError("thresholds must satisfy 0 <= iou_low <= iou_high <= 1");
  }
}

const char* MatchRuleName(MatchRule rule) {
  return rule == MatchRule::kRuleA ? "RuleA" : "RuleB";
}

double IntervalIoU(const TimeInterval& a, const TimeInterval& b) {
  const double intersection =
      std::max(0.0, std::min(a.end_s, b.end_s) - std::max(a.start_s, b.start_s));
  const double hull =
      std::max(a.end_s, b.end_s) - std::min(a.start_s, b.start_s);
  if (!(hull > 0.0)) return 0.0;
  // Rounding can push the ratio a hair above 1 for near-identical intervals.
  return std::min(1.0, intersection / hull);
}

std::optional<MatchDecision> MatchClipAction(
    const ClipRecord& clip, const ActionRecord& action,
    const MatchThresholds& thresholds) {
  if (clip.video_id != action.video_id) {
    throw DataError("cannot match clip '" + clip.clip_id + "' of video '" +
                    clip.video_id + "' against an action of video '" +
                    action.video_id + "'");
  }
  const double iou = IntervalIoU(clip.interval, action.interval);
  const double start_diff =
      std::abs(clip.interval.start_s - action.interval.start_s);

  const bool rule_b = iou > thresholds.iou_high;
  const bool rule_a = start_diff < thresholds.max_start_diff_s &&
                      clip.interval.end_s > action.interval.end_s &&
                      iou > thresholds.iou_low;
  if (!rule_a && !rule_b) return std::nullopt;
  return MatchDecision{iou, start_diff,
                       rule_b ? MatchRule::kRuleB : MatchRule::kRuleA};
}

std::vector<MatchRecord> MatchDataset(const DatasetManifest& manifest,
                                      const MatchThresholds& thresholds,
                                      int threads) {
  thresholds.Validate();
  static const std::vector<ActionRecord> kNoActions;

  std::vector<const std::pair<const std::string, VideoEntry>*> videos;
  videos.reserve(manifest.videos.size());
  for (const auto& entry : manifest.videos) videos.push_back(&entry);

  std::vector<std::vector<MatchRecord>> per_video(videos.size());
  internal::ParallelFor(videos.size(), threads, [&](std::size_t i) {
    const auto& [video_id, video] = *videos[i];
    auto it = manifest.actions.find(video_id);
    per_video[i] = MatchVideo(
        video_id, video, it == manifest.actions.end() ? kNoActions : it->second,
        thresholds);
  });

  std::vector<MatchRecord> out;
  for (auto& part : per_video) {
    out.insert(out.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return out;
}

FilterResult FilterMatched(const DatasetManifest& manifest,
                           const std::vector<MatchRecord>& matches,
                           FilterPolicy policy) {
  static const std::vector<ActionRecord> kNoActions;

  // (video_id, clip_id) -> matches for that clip.
  std::map<std::pair<std::string, std::string>,
           std::vector<const MatchRecord*>>
      by_clip;
  for (const MatchRecord& match : matches) {
    auto video = manifest.videos.find(match.video_id);
    const bool clip_known =
        video != manifest.videos.end() &&
        std::any_of(video->second.clips.begin(), video->second.clips.end(),
                    [&](const ClipRecord& c) { return c.clip_id == match.clip_id; });
    if (!clip_known) {
      throw DataError("match references unknown clip '" + match.clip_id +
                      "' in video '" + match.video_id + "'");
    }
    auto actions = manifest.actions.find(match.video_id);
    const std::size_t action_count =
        actions == manifest.actions.end() ? 0 : actions->second.size();
    if (match.action_index >= action_count) {
      throw DataError("match references unknown action index " +
                      std::to_string(match.action_index) + " in video '" +
                      match.video_id + "'");
    }
    by_clip[{match.video_id, match.clip_id}].push_back(&match);
  }

  FilterResult result;
  result.manifest.split_tag = manifest.split_tag;
  for (const auto& [video_id, video] : manifest.videos) {
    auto actions_it = manifest.actions.find(video_id);
    const auto& actions = actions_it == manifest.actions.end()
                              ? kNoActions
                              : actions_it->second;
    VideoEntry kept;
    kept.duration_s = video.duration_s;
    for (const ClipRecord& clip : video.clips) {
      auto found = by_clip.find({video_id, clip.clip_id});
      if (found == by_clip.end()) continue;
      kept.clips.push_back(clip);

      std::vector<std::size_t> indices;
      if (policy == FilterPolicy::kBestPerClip) {
        // Highest IoU; ties go to the earlier action start, then the smaller
        // index.
        const MatchRecord* best = nullptr;
        for (const MatchRecord* m : found->second) {
          if (best == nullptr) {
            best = m;
            continue;
          }
          const double m_start = actions[m->action_index].interval.start_s;
          const double b_start = actions[best->action_index].interval.start_s;
          if (std::make_tuple(-m->iou, m_start, m->action_index) <
              std::make_tuple(-best->iou, b_start, best->action_index)) {
            best = m;
          }
        }
        indices.push_back(best->action_index);
      } else {
        for (const MatchRecord* m : found->second) {
          indices.push_back(m->action_index);
        }
        std::sort(indices.begin(), indices.end());
        indices.erase(std::unique(indices.begin(), indices.end()),
                      indices.end());
      }
      result.assignment[{video_id, clip.clip_id}] = std::move(indices);
    }
    if (kept.clips.empty()) continue;
    result.manifest.videos.emplace(video_id, std::move(kept));
    if (actions_it != manifest.actions.end()) {
      result.manifest.actions.emplace(video_id, actions);
    }
  }
  return result;
}

std::size_t WriteMatches(const std::vector<MatchRecord>& matches,
                         std::ostream& out) {
  std::size_t bytes = 0;
  for (const MatchRecord& m : matches) {
    // Doubles are emitted in shortest round-trip form, which keeps every
    // significant digit of the IoU.
    bytes += internal::WriteJsonLine(
        out, Json{{"video_id", m.video_id},
                  {"clip_id", m.clip_id},
                  {"action_index", m.action_index},
                  {"iou", m.iou},
                  {"start_diff_s", m.start_diff_s},
                  {"rule", MatchRuleName(m.rule)}});
  }
  out.flush();
  if (!out) throw IoError("write failure");
  return bytes;
}

std::vector<MatchRecord> ParseMatches(std::istream& in) {
  std::vector<MatchRecord> matches;
  internal::ForEachJsonLine(in, [&](std::size_t line, const Json& record) {
    MatchRecord m;
    m.video_id = internal::RequireString(record, "video_id", line);
    m.clip_id = internal::RequireString(record, "clip_id", line);
    const std::int64_t index =
        internal::RequireInteger(record, "action_index", line);
    if (index < 0) throw ParseError(line, "action_index", "negative");
    m.action_index = static_cast<std::size_t>(index);
    m.iou = internal::RequireNumber(record, "iou", line);
    if (m.iou < 0.0 || m.iou > 1.0) {
      throw ParseError(line, "iou", "outside [0, 1]");
    }
    m.start_diff_s = internal::RequireNumber(record, "start_diff_s", line);
    if (m.start_diff_s < 0.0) throw ParseError(line, "start_diff_s", "negative");
    m.rule = ParseRule(internal::RequireString(record, "rule", line), line);
    matches.push_back(std::move(m));
  });
  return matches;
}

}  // namespace narrkit
