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

#ifndef NARRKIT_STATS_H_
#define NARRKIT_STATS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "narrkit/manifest.h"

namespace narrkit {

// Fixed-edge histogram with half-open bins [edges[i], edges[i + 1]).
struct Histogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
  std::size_t underflow = 0;
  std::size_t overflow = 0;

  std::size_t total() const;

  // Adds the counts of `other`, which must have identical edges.
  void Merge(const Histogram& other);

  friend bool operator==(const Histogram&, const Histogram&) = default;
};

struct SummaryStats {
  std::size_t n = 0;
  double mean = 0.0;
  // Lower-middle element for even n.
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Throws DataError unless there are at least two strictly increasing, finite
// edges.
Histogram MakeHistogram(std::span<const double> values,
                        std::span<const double> edges);

// Throws DataError on empty input.
SummaryStats Summarize(std::span<const double> values);

// Evenly spaced edges lo, lo + step, ..., up to and including hi.
std::vector<double> LinearEdges(double lo, double hi, double step);

SummaryStats ClipLengthSummary(const DatasetManifest& manifest);
SummaryStats ClipsPerVideoSummary(const DatasetManifest& manifest);

std::vector<double> ClipLengths(const DatasetManifest& manifest);
std::vector<double> ClipsPerVideo(const DatasetManifest& manifest);
// Only videos with a known duration contribute.
std::vector<double> VideoLengths(const DatasetManifest& manifest);

// Number of maximal runs of non-whitespace characters.
std::size_t CountWords(std::string_view text);

struct TextRecord {
  std::string text;
  std::optional<std::int64_t> tokens;
};

enum class LengthCounter { kWords, kPrecomputedTokens };

struct TextLengthStats {
  Histogram histogram;
  // Unset when there are no records.
  std::optional<SummaryStats> summary;
};

// Throws DataError if kPrecomputedTokens is requested and any record lacks a
// token count.
TextLengthStats ComputeTextLengthStats(const std::vector<TextRecord>& records,
                                       LengthCounter counter,
                                       std::span<const double> edges);

std::vector<TextRecord> CaptionTexts(const DatasetManifest& manifest);
std::vector<TextRecord> ActionTexts(const DatasetManifest& manifest);

// Caption words summed per video, one value per video with clips.
std::vector<double> CaptionWordsPerVideo(const DatasetManifest& manifest);

struct StatsEdges {
  std::vector<double> video_length_s = LinearEdges(0, 600, 30);
  std::vector<double> clip_length_s = LinearEdges(0, 60, 5);
  std::vector<double> clips_per_video = LinearEdges(0, 30, 1);
  std::vector<double> action_words = LinearEdges(0, 60, 5);
  std::vector<double> caption_words = LinearEdges(0, 150, 10);
  std::vector<double> action_tokens = LinearEdges(0, 150, 10);
  std::vector<double> caption_tokens = LinearEdges(0, 250, 10);
};

// Builds the profile report as a flat JSON object. For every named
// distribution X the keys are X.edges, X.counts, X.underflow, X.overflow,
// X.n, X.mean, X.median, X.min and X.max. Token distributions are present
// only when every record of that kind carries a token count.
nlohmann::ordered_json BuildStatsReport(const DatasetManifest& manifest,
                                        const StatsEdges& edges);

}  // namespace narrkit

#endif  // NARRKIT_STATS_H_
