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

#include "narrkit/scoring.h"

#include <algorithm>
#include <cctype>

#include "json_lines.h"

namespace narrkit {
namespace {

using internal::Json;

double Mean(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

int TierToScore(MatchTier tier) {
  switch (tier) {
    case MatchTier::kVeryMatch:
      return 100;
    case MatchTier::kGoodMatch:
      return 85;
    case MatchTier::kSomehowMatch:
      return 70;
    case MatchTier::kNotMatch:
      return 0;
  }
  return 0;
}

const char* TierName(MatchTier tier) {
  switch (tier) {
    case MatchTier::kVeryMatch:
      return "VeryMatch";
    case MatchTier::kGoodMatch:
      return "GoodMatch";
    case MatchTier::kSomehowMatch:
      return "SomehowMatch";
    case MatchTier::kNotMatch:
      return "NotMatch";
  }
  return "NotMatch";
}

MatchTier ParseTier(std::string_view name) {
  std::string key;
  for (char c : name) {
    if (c == ' ' || c == '_' || c == '-') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  for (MatchTier tier : kAllTiers) {
    std::string candidate = TierName(tier);
    std::transform(candidate.begin(), candidate.end(), candidate.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (candidate == key) return tier;
  }
  throw DataError("unknown matching tier '" + std::string(name) + "'");
}

TierAggregate AggregateTiers(const std::vector<TierJudgment>& judgments) {
  if (judgments.empty()) throw DataError("no tier judgments to aggregate");
  TierAggregate out;
  std::map<std::string, std::vector<double>> by_rater;
  std::map<std::string, std::vector<double>> by_item;
  std::vector<double> all;
  all.reserve(judgments.size());
  for (const TierJudgment& j : judgments) {
    const double score = TierToScore(j.tier);
    all.push_back(score);
    by_rater[j.rater_id].push_back(score);
    by_item[j.item_id].push_back(score);
    ++out.per_tier_counts[static_cast<std::size_t>(j.tier)];
  }
  out.judgment_mean = Mean(all);
  for (const auto& [rater, scores] : by_rater) {
    out.per_rater_means[rater] = Mean(scores);
  }
  std::vector<double> item_means;
  for (const auto& [item, scores] : by_item) {
    out.per_item_means[item] = Mean(scores);
    item_means.push_back(out.per_item_means[item]);
  }
  out.mean_score = Mean(item_means);
  return out;
}

RatingAggregate AggregateRatings(const std::vector<VlmRating>& ratings) {
  if (ratings.empty()) throw DataError("no ratings to aggregate");
  RatingAggregate out;
  double sum = 0.0;
  std::size_t hallucinated = 0;
  for (const VlmRating& r : ratings) {
    if (r.rating < 0 || r.rating > kMaxRating) {
      throw DataError("rating " + std::to_string(r.rating) + " of item '" +
                      r.item_id + "' is outside 0..6");
    }
    sum += r.rating;
    if (r.rating <= kMaxHallucinatedRating) ++hallucinated;
    ++out.distribution[static_cast<std::size_t>(r.rating)];
  }
  const auto n = static_cast<double>(ratings.size());
  out.mean_rating = sum / n;
  out.hallucination_rate = static_cast<double>(hallucinated) / n;
  return out;
}

JudgmentFile ParseJudgments(std::istream& in) {
  JudgmentFile file;
  internal::ForEachJsonLine(in, [&](std::size_t line, const Json& record) {
    const std::string item = internal::RequireString(record, "item_id", line);
    const bool has_tier = record.contains("tier");
    const bool has_rating = record.contains("rating");
    if (has_tier == has_rating) {
      throw ParseError(line, "", "record needs exactly one of tier or rating");
    }
    if (has_tier) {
      TierJudgment j;
      j.item_id = item;
      j.rater_id = internal::RequireString(record, "rater_id", line);
      try {
        j.tier = ParseTier(internal::RequireString(record, "tier", line));
      } catch (const ParseError&) {
        throw;
      } catch (const DataError& e) {
        throw ParseError(line, "tier", e.what());
      }
      file.tiers.push_back(std::move(j));
    } else {
      const std::int64_t rating =
          internal::RequireInteger(record, "rating", line);
      if (rating < 0 || rating > kMaxRating) {
        throw ParseError(line, "rating", "outside 0..6");
      }
      file.ratings.push_back({item, static_cast<int>(rating)});
    }
  });
  return file;
}

}  // namespace narrkit
