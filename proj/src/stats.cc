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

#include "narrkit/stats.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "narrkit/errors.h"

namespace narrkit {
namespace {

void CheckEdges(std::span<const double> edges) {
  if (edges.size() < 2) throw DataError("histogram needs at least two edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!std::isfinite(edges[i])) throw DataError("histogram edge not finite");
    if (i > 0 && !(edges[i] > edges[i - 1])) {
      throw DataError("histogram edges must be strictly increasing");
    }
  }
}

void AddDistribution(nlohmann::ordered_json& report, const std::string& name,
                     std::span<const double> values,
                     std::span<const double> edges) {
  const Histogram h = MakeHistogram(values, edges);
  report[name + ".edges"] = h.edges;
  report[name + ".counts"] = h.counts;
  report[name + ".underflow"] = h.underflow;
  report[name + ".overflow"] = h.overflow;
  report[name + ".n"] = values.size();
  if (values.empty()) {
    for (const char* key : {".mean", ".median", ".min", ".max"}) {
      report[name + key] = nullptr;
    }
    return;
  }
  const SummaryStats s = Summarize(values);
  report[name + ".mean"] = s.mean;
  report[name + ".median"] = s.median;
  report[name + ".min"] = s.min;
  report[name + ".max"] = s.max;
}

std::vector<double> Lengths(const std::vector<TextRecord>& records,
                            LengthCounter counter) {
  std::vector<double> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (counter == LengthCounter::kWords) {
      out.push_back(static_cast<double>(CountWords(records[i].text)));
    } else {
      if (!records[i].tokens) {
        throw DataError("record " + std::to_string(i) +
                        " has no precomputed token count");
      }
      out.push_back(static_cast<double>(*records[i].tokens));
    }
  }
  return out;
}

bool AllHaveTokens(const std::vector<TextRecord>& records) {
  return !records.empty() &&
         std::all_of(records.begin(), records.end(),
                     [](const TextRecord& r) { return r.tokens.has_value(); });
}

}  // namespace

std::size_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0}) +
         underflow + overflow;
}

void Histogram::Merge(const Histogram& other) {
  if (edges != other.edges) {
    throw DataError("cannot merge histograms with different edges");
  }
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  underflow += other.underflow;
  overflow += other.overflow;
}

Histogram MakeHistogram(std::span<const double> values,
                        std::span<const double> edges) {
  CheckEdges(edges);
  Histogram h;
  h.edges.assign(edges.begin(), edges.end());
  h.counts.assign(edges.size() - 1, 0);
  for (double v : values) {
    if (std::isnan(v)) throw DataError("histogram value is NaN");
    if (v < edges.front()) {
      ++h.underflow;
    } else if (v >= edges.back()) {
      ++h.overflow;
    } else {
      // First edge strictly greater than v closes v's bin.
      auto upper = std::upper_bound(edges.begin(), edges.end(), v);
      ++h.counts[static_cast<std::size_t>(upper - edges.begin()) - 1];
    }
  }
  return h;
}

SummaryStats Summarize(std::span<const double> values) {
  if (values.empty()) throw DataError("cannot summarize an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  SummaryStats s;
  s.n = sorted.size();
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) /
           static_cast<double>(s.n);
  s.median = sorted[(s.n - 1) / 2];
  s.min = sorted.front();
  s.max = sorted.back();
  return s;
}

std::vector<double> LinearEdges(double lo, double hi, double step) {
  std::vector<double> edges;
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step));
  edges.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    edges.push_back(lo + step * static_cast<double>(i));
  }
  return edges;
}

std::vector<double> ClipLengths(const DatasetManifest& manifest) {
  std::vector<double> out;
  for (const auto& [id, video] : manifest.videos) {
    for (const ClipRecord& clip : video.clips) {
      out.push_back(clip.interval.length());
    }
  }
  return out;
}

std::vector<double> ClipsPerVideo(const DatasetManifest& manifest) {
  std::vector<double> out;
  for (const auto& [id, video] : manifest.videos) {
    out.push_back(static_cast<double>(video.clips.size()));
  }
  return out;
}

std::vector<double> VideoLengths(const DatasetManifest& manifest) {
  std::vector<double> out;
  for (const auto& [id, video] : manifest.videos) {
    if (video.duration_s) out.push_back(*video.duration_s);
  }
  return out;
}

SummaryStats ClipLengthSummary(const DatasetManifest& manifest) {
  const auto lengths = ClipLengths(manifest);
  if (lengths.empty()) throw DataError("manifest has no clips");
  return Summarize(lengths);
}

SummaryStats ClipsPerVideoSummary(const DatasetManifest& manifest) {
  const auto counts = ClipsPerVideo(manifest);
  if (counts.empty()) throw DataError("manifest has no videos");
  return Summarize(counts);
}

std::size_t CountWords(std::string_view text) {
  std::size_t words = 0;
  bool in_word = false;
  for (char c : text) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) ++words;
    in_word = !space;
  }
  return words;
}

TextLengthStats ComputeTextLengthStats(const std::vector<TextRecord>& records,
                                       LengthCounter counter,
                                       std::span<const double> edges) {
  const auto lengths = Lengths(records, counter);
  TextLengthStats out;
  out.histogram = MakeHistogram(lengths, edges);
  if (!lengths.empty()) out.summary = Summarize(lengths);
  return out;
}

std::vector<TextRecord> CaptionTexts(const DatasetManifest& manifest) {
  std::vector<TextRecord> out;
  for (const auto& [id, video] : manifest.videos) {
    for (const ClipRecord& clip : video.clips) {
      out.push_back({clip.caption, clip.tokens});
    }
  }
  return out;
}

std::vector<TextRecord> ActionTexts(const DatasetManifest& manifest) {
  std::vector<TextRecord> out;
  for (const auto& [id, list] : manifest.actions) {
    for (const ActionRecord& action : list) {
      out.push_back({action.description, action.tokens});
    }
  }
  return out;
}

std::vector<double> CaptionWordsPerVideo(const DatasetManifest& manifest) {
  std::vector<double> out;
  for (const auto& [id, video] : manifest.videos) {
    if (video.clips.empty()) continue;
    std::size_t words = 0;
    for (const ClipRecord& clip : video.clips) words += CountWords(clip.caption);
    out.push_back(static_cast<double>(words));
  }
  return out;
}

nlohmann::ordered_json BuildStatsReport(const DatasetManifest& manifest,
                                        const StatsEdges& edges) {
  nlohmann::ordered_json report;
  report["videos"] = manifest.videos.size();
  report["clips"] = manifest.clip_count();
  report["actions"] = manifest.action_count();

  AddDistribution(report, "video_length_s", VideoLengths(manifest),
                  edges.video_length_s);
  AddDistribution(report, "clip_length_s", ClipLengths(manifest),
                  edges.clip_length_s);
  AddDistribution(report, "clips_per_video", ClipsPerVideo(manifest),
                  edges.clips_per_video);

  const auto actions = ActionTexts(manifest);
  const auto captions = CaptionTexts(manifest);
  AddDistribution(report, "action_words",
                  Lengths(actions, LengthCounter::kWords), edges.action_words);
  AddDistribution(report, "caption_words",
                  Lengths(captions, LengthCounter::kWords),
                  edges.caption_words);
  if (AllHaveTokens(actions)) {
    AddDistribution(report, "action_tokens",
                    Lengths(actions, LengthCounter::kPrecomputedTokens),
                    edges.action_tokens);
  }
  if (AllHaveTokens(captions)) {
    AddDistribution(report, "caption_tokens",
                    Lengths(captions, LengthCounter::kPrecomputedTokens),
                    edges.caption_tokens);
  }
  const auto per_video = CaptionWordsPerVideo(manifest);
  report["caption_words_per_video.mean"] =
      per_video.empty() ? nlohmann::ordered_json(nullptr)
                        : nlohmann::ordered_json(Summarize(per_video).mean);
  return report;
}

}  // namespace narrkit
