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

#ifndef NARRKIT_SCORING_H_
#define NARRKIT_SCORING_H_

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace narrkit {

// Human caption-matching tiers, judged on coverage and hallucination of the
// important actions and objects.
enum class MatchTier { kVeryMatch, kGoodMatch, kSomehowMatch, kNotMatch };

inline constexpr std::array<MatchTier, 4> kAllTiers = {
    MatchTier::kVeryMatch, MatchTier::kGoodMatch, MatchTier::kSomehowMatch,
    MatchTier::kNotMatch};

// 100 / 85 / 70 / 0.
int TierToScore(MatchTier tier);
const char* TierName(MatchTier tier);
// Accepts "VeryMatch", "Very Match", "very_match" and similar spellings.
// Throws DataError otherwise.
MatchTier ParseTier(std::string_view name);

struct TierJudgment {
  std::string item_id;
  MatchTier tier = MatchTier::kNotMatch;
  std::string rater_id;
};

struct TierAggregate {
  // Judgments are averaged per item first, then across items.
  double mean_score = 0.0;
  // Plain mean over all judgments.
  double judgment_mean = 0.0;
  // Indexed by MatchTier.
  std::array<std::size_t, 4> per_tier_counts{};
  std::map<std::string, double> per_rater_means;
  std::map<std::string, double> per_item_means;
};

// Throws DataError on empty input.
TierAggregate AggregateTiers(const std::vector<TierJudgment>& judgments);

// Captioner rating on the 0..6 scale. Ratings 0-2 are the "with
// hallucination" tiers; 3-6 carry no hallucination.
struct VlmRating {
  std::string item_id;
  int rating = 0;
};

inline constexpr int kMaxRating = 6;
inline constexpr int kMaxHallucinatedRating = 2;

struct RatingAggregate {
  double mean_rating = 0.0;
  double hallucination_rate = 0.0;
  std::array<std::size_t, kMaxRating + 1> distribution{};
};

// Throws DataError on empty input or a rating outside 0..6.
RatingAggregate AggregateRatings(const std::vector<VlmRating>& ratings);

struct JudgmentFile {
  std::vector<TierJudgment> tiers;
  std::vector<VlmRating> ratings;
};

// Reads line-delimited {item_id, rater_id, tier} and {item_id, rating}
// records; both kinds may be mixed in one file.
JudgmentFile ParseJudgments(std::istream& in);

}  // namespace narrkit

#endif  // NARRKIT_SCORING_H_
