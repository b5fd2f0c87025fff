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
#include <random>
#include <sstream>

#include "gtest/gtest.h"
#include "narrkit/errors.h"

namespace narrkit {
namespace {

TEST(TierTest, ScoreTable) {
  EXPECT_EQ(TierToScore(MatchTier::kVeryMatch), 100);
  EXPECT_EQ(TierToScore(MatchTier::kGoodMatch), 85);
  EXPECT_EQ(TierToScore(MatchTier::kSomehowMatch), 70);
  EXPECT_EQ(TierToScore(MatchTier::kNotMatch), 0);
}

TEST(TierTest, ParsesCommonSpellings) {
  EXPECT_EQ(ParseTier("VeryMatch"), MatchTier::kVeryMatch);
  EXPECT_EQ(ParseTier("Very Match"), MatchTier::kVeryMatch);
  EXPECT_EQ(ParseTier("good_match"), MatchTier::kGoodMatch);
  EXPECT_EQ(ParseTier("Somehow Match"), MatchTier::kSomehowMatch);
  EXPECT_EQ(ParseTier("not-match"), MatchTier::kNotMatch);
  EXPECT_THROW(ParseTier("Perfect"), DataError);
}

TEST(AggregateTiersTest, HandValues) {
  const auto agg = AggregateTiers(
      {{"i1", MatchTier::kVeryMatch, "r1"}, {"i2", MatchTier::kGoodMatch, "r1"}});
  EXPECT_DOUBLE_EQ(agg.mean_score, 92.5);
  EXPECT_DOUBLE_EQ(agg.judgment_mean, 92.5);
  EXPECT_EQ(agg.per_tier_counts[0], 1u);
  EXPECT_EQ(agg.per_tier_counts[1], 1u);
  EXPECT_DOUBLE_EQ(agg.per_rater_means.at("r1"), 92.5);

  EXPECT_DOUBLE_EQ(AggregateTiers({{"a", MatchTier::kNotMatch, "r"},
                                   {"b", MatchTier::kNotMatch, "s"}})
                       .mean_score,
                   0.0);
  EXPECT_DOUBLE_EQ(
      AggregateTiers({{"a", MatchTier::kVeryMatch, "r"}}).mean_score, 100.0);
}

TEST(AggregateTiersTest, ItemsWeighEquallyRegardlessOfRaterCount) {
  // Item a: three raters (100, 100, 70) -> 90; item b: one rater -> 0.
  const auto agg = AggregateTiers({{"a", MatchTier::kVeryMatch, "r1"},
                                   {"a", MatchTier::kVeryMatch, "r2"},
                                   {"a", MatchTier::kSomehowMatch, "r3"},
                                   {"b", MatchTier::kNotMatch, "r1"}});
  EXPECT_DOUBLE_EQ(agg.per_item_means.at("a"), 90.0);
  EXPECT_DOUBLE_EQ(agg.mean_score, 45.0);
  EXPECT_DOUBLE_EQ(agg.judgment_mean, 67.5);
  EXPECT_DOUBLE_EQ(agg.per_rater_means.at("r1"), 50.0);
}

TEST(AggregateTiersTest, BoundedAndPermutationInvariant) {
  std::mt19937_64 rng(3);
  std::vector<TierJudgment> js;
  for (int i = 0; i < 60; ++i) {
    js.push_back({"item" + std::to_string(rng() % 15),
                  kAllTiers[rng() % 4], "r" + std::to_string(rng() % 6)});
  }
  const auto base = AggregateTiers(js);
  EXPECT_GE(base.mean_score, 0.0);
  EXPECT_LE(base.mean_score, 100.0);
  for (int i = 0; i < 5; ++i) {
    std::shuffle(js.begin(), js.end(), rng);
    EXPECT_NEAR(AggregateTiers(js).mean_score, base.mean_score, 1e-12);
  }
}

TEST(AggregateTiersTest, EmptyThrows) {
  EXPECT_THROW(AggregateTiers({}), DataError);
}

TEST(AggregateRatingsTest, HandValues) {
  auto agg = AggregateRatings({{"a", 6}, {"b", 6}, {"c", 3}});
  EXPECT_DOUBLE_EQ(agg.mean_rating, 5.0);
  EXPECT_DOUBLE_EQ(agg.hallucination_rate, 0.0);
  EXPECT_EQ(agg.distribution[6], 2u);
  EXPECT_EQ(agg.distribution[3], 1u);

  EXPECT_DOUBLE_EQ(AggregateRatings({{"a", 0}}).hallucination_rate, 1.0);
  EXPECT_DOUBLE_EQ(AggregateRatings({{"a", 2}, {"b", 5}}).hallucination_rate,
                   0.5);
}

TEST(AggregateRatingsTest, HallucinationRateIsZeroIffAllAtLeastThree) {
  for (int r = 0; r <= 6; ++r) {
    const double rate = AggregateRatings({{"x", r}, {"y", 6}}).hallucination_rate;
    EXPECT_EQ(rate == 0.0, r >= 3) << r;
  }
}

TEST(AggregateRatingsTest, RejectsOutOfRange) {
  EXPECT_THROW(AggregateRatings({{"a", 7}}), DataError);
  EXPECT_THROW(AggregateRatings({{"a", -1}}), DataError);
  EXPECT_THROW(AggregateRatings({}), DataError);
}

TEST(JudgmentFileTest, MixedRecords) {
  std::istringstream in(
      R"({"item_id":"a","rater_id":"r1","tier":"Very Match"})"
      "\n"
      R"({"item_id":"a","rating":5})"
      "\n"
      R"({"item_id":"b","rater_id":"r2","tier":"NotMatch"})"
      "\n");
  const auto file = ParseJudgments(in);
  ASSERT_EQ(file.tiers.size(), 2u);
  ASSERT_EQ(file.ratings.size(), 1u);
  EXPECT_EQ(file.tiers[0].tier, MatchTier::kVeryMatch);
  EXPECT_EQ(file.ratings[0].rating, 5);
}

TEST(JudgmentFileTest, Errors) {
  std::istringstream bad_rating(R"({"item_id":"a","rating":9})");
  EXPECT_THROW(ParseJudgments(bad_rating), ParseError);
  std::istringstream bad_tier(R"({"item_id":"a","rater_id":"r","tier":"meh"})");
  EXPECT_THROW(ParseJudgments(bad_tier), ParseError);
  std::istringstream both(R"({"item_id":"a","rater_id":"r","tier":"NotMatch","rating":1})");
  EXPECT_THROW(ParseJudgments(both), ParseError);
}

}  // namespace
}  // namespace narrkit
