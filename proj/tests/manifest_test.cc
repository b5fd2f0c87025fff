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
#include <random>
#include <sstream>

#include "gtest/gtest.h"
#include "narrkit/errors.h"
#include "testing/generators.h"

namespace narrkit {
namespace {

DatasetManifest Parse(const std::string& text) {
  std::istringstream in(text);
  return ParseManifest(in);
}

std::string Write(const DatasetManifest& m) {
  std::ostringstream out;
  WriteManifest(m, out);
  return out.str();
}

constexpr char kSmall[] =
    R"({"kind":"clip","video_id":"v1","clip_id":"b","start_s":20.5,"end_s":30,"caption":"stir the sauce"})"
    "\n"
    R"({"kind":"action","video_id":"v1","start_s":1,"end_s":9,"description":"chop onions"})"
    "\n"
    R"({"kind":"video","video_id":"v1","duration_s":120})"
    "\n"
    R"({"kind":"clip","video_id":"v1","clip_id":"a","start_s":0,"end_s":10.25,"caption":"a knife chops onions"})"
    "\n";

TEST(ManifestTest, ParsesAllRecordKindsInAnyOrder) {
  const DatasetManifest m = Parse(kSmall);
  ASSERT_EQ(m.videos.size(), 1u);
  const VideoEntry& v = m.videos.at("v1");
  EXPECT_EQ(v.duration_s, 120.0);
  ASSERT_EQ(v.clips.size(), 2u);
  // Sorted by start time on ingest.
  EXPECT_EQ(v.clips[0].clip_id, "a");
  EXPECT_EQ(v.clips[1].clip_id, "b");
  EXPECT_EQ(v.clips[0].interval, (TimeInterval{0.0, 10.25}));
  ASSERT_EQ(m.action_count(), 1u);
  EXPECT_EQ(m.actions.at("v1")[0].description, "chop onions");
  EXPECT_TRUE(ValidateManifest(m).empty());
}

TEST(ManifestTest, EmptyInputIsEmptyManifest) {
  const DatasetManifest m = Parse("");
  EXPECT_TRUE(m.videos.empty());
  EXPECT_TRUE(m.actions.empty());
  EXPECT_FALSE(m.split_tag.has_value());
}

TEST(ManifestTest, InvertedClipIntervalNamesTheClip) {
  const std::string text =
      R"({"kind":"video","video_id":"v"})"
      "\n"
      R"({"kind":"clip","video_id":"v","clip_id":"bad7","start_s":10,"end_s":10,"caption":"x"})"
      "\n";
  try {
    Parse(text);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("bad7"), std::string::npos);
  }
}

TEST(ManifestTest, MalformedLinesCarryLineAndField) {
  const std::string missing =
      R"({"kind":"video","video_id":"v"})"
      "\n\n"
      R"({"kind":"clip","video_id":"v","clip_id":"c","start_s":1,"caption":"x"})";
  try {
    Parse(missing);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.field(), "end_s");
  }
  EXPECT_THROW(Parse("not json\n"), ParseError);
  EXPECT_THROW(Parse("[1,2]\n"), ParseError);
  EXPECT_THROW(Parse(R"({"kind":"scene","video_id":"v"})"), ParseError);
  EXPECT_THROW(
      Parse(R"({"kind":"clip","video_id":"v","clip_id":"c","start_s":"1","end_s":2,"caption":"x"})"),
      ParseError);
  EXPECT_THROW(
      Parse(R"({"kind":"clip","video_id":"v","clip_id":"c","start_s":1,"end_s":2,"caption":"   "})"),
      ParseError);
  EXPECT_THROW(
      Parse(R"({"kind":"clip","video_id":"v","clip_id":"c","start_s":-1,"end_s":2,"caption":"x"})"),
      ParseError);
}

TEST(ManifestTest, DuplicateClipIdIsAParseError) {
  const std::string text =
      R"({"kind":"clip","video_id":"v","clip_id":"c","start_s":1,"end_s":2,"caption":"x"})"
      "\n"
      R"({"kind":"clip","video_id":"v","clip_id":"c","start_s":3,"end_s":4,"caption":"y"})"
      "\n";
  try {
    Parse(text);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.field(), "clip_id");
  }
  // The same clip id in another video is fine.
  EXPECT_NO_THROW(Parse(
      R"({"kind":"clip","video_id":"v","clip_id":"c","start_s":1,"end_s":2,"caption":"x"})"
      "\n"
      R"({"kind":"clip","video_id":"w","clip_id":"c","start_s":1,"end_s":2,"caption":"x"})"));
}

TEST(ManifestTest, ValidateReportsClipPastDuration) {
  DatasetManifest m;
  m.videos["v"].duration_s = 30.0;
  m.videos["v"].clips.push_back({"v", "late", {25.0, 31.0}, "cap", {}});
  const auto violations = ValidateManifest(m);
  ASSERT_EQ(violations.size(), 1u);
  EXPECT_EQ(violations[0].kind, Violation::Kind::kClipOutsideDuration);
  EXPECT_EQ(violations[0].video_id, "v");
  EXPECT_EQ(violations[0].clip_id, "late");
}

TEST(ManifestTest, ValidateSkipsDurationCheckWhenUnknown) {
  DatasetManifest m;
  m.videos["v"].clips.push_back({"v", "c", {25.0, 3100.0}, "cap", {}});
  EXPECT_TRUE(ValidateManifest(m).empty());
}

TEST(ManifestTest, ValidateReportsDuplicateIdsOnce) {
  DatasetManifest m;
  m.videos["v"].clips.push_back({"v", "dup", {0.0, 1.0}, "a", {}});
  m.videos["v"].clips.push_back({"v", "dup", {2.0, 3.0}, "b", {}});
  const auto violations = ValidateManifest(m);
  ASSERT_EQ(violations.size(), 1u);
  EXPECT_EQ(violations[0].kind, Violation::Kind::kDuplicateClipId);
}

TEST(ManifestTest, ValidateReturnsEveryBreach) {
  DatasetManifest m;
  m.videos["v"].duration_s = 10.0;
  m.videos["v"].clips.push_back({"v", "x", {5.0, 4.0}, " ", {}});
  m.videos["v"].clips.push_back({"w", "y", {1.0, 20.0}, "ok", {}});
  m.actions["v"].push_back({"v", {3.0, 3.0}, "", {}});
  const auto violations = ValidateManifest(m);
  std::vector<Violation::Kind> kinds;
  for (const auto& v : violations) kinds.push_back(v.kind);
  using K = Violation::Kind;
  for (K expected : {K::kInvalidInterval, K::kEmptyCaption, K::kVideoIdMismatch,
                     K::kClipOutsideDuration, K::kClipsUnordered,
                     K::kEmptyDescription}) {
    EXPECT_NE(std::find(kinds.begin(), kinds.end(), expected), kinds.end())
        << ViolationKindName(expected);
  }
}

TEST(ManifestTest, WellFormedRandomManifestsValidateClean) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    testing::ManifestShape shape;
    shape.videos = 3;
    EXPECT_TRUE(ValidateManifest(testing::RandomManifest(rng, shape)).empty());
  }
}

TEST(ManifestTest, PartitionSplitsVideosAndActions) {
  std::mt19937_64 rng(11);
  testing::ManifestShape shape;
  shape.videos = 5;
  const DatasetManifest m = testing::RandomManifest(rng, shape);
  const auto split = Partition(m, {"vid1", "vid3"});
  EXPECT_EQ(split.train.videos.size(), 3u);
  EXPECT_EQ(split.val.videos.size(), 2u);
  EXPECT_EQ(split.val.split_tag, SplitTag::kVal);
  EXPECT_EQ(split.train.split_tag, SplitTag::kTrain);
  for (const auto& [id, video] : split.val.videos) {
    EXPECT_EQ(video, m.videos.at(id));
    EXPECT_FALSE(split.train.videos.contains(id));
  }
  EXPECT_EQ(split.train.action_count() + split.val.action_count(),
            m.action_count());
}

TEST(ManifestTest, PartitionWithEmptyValKeepsEverythingInTrain) {
  std::mt19937_64 rng(12);
  const DatasetManifest m = testing::RandomManifest(rng, {});
  const auto split = Partition(m, {});
  EXPECT_TRUE(split.val.videos.empty());
  EXPECT_EQ(split.train.videos, m.videos);
  EXPECT_EQ(split.train.actions, m.actions);
}

TEST(ManifestTest, PartitionRejectsUnknownIds) {
  DatasetManifest m;
  m.videos["a"];
  try {
    Partition(m, {"a", "x"});
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("'x'"), std::string::npos);
  }
}

TEST(ManifestTest, EmptyManifestRoundTripsThroughHeader) {
  const std::string text = Write(DatasetManifest{});
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
  EXPECT_EQ(Parse(text), DatasetManifest{});
}

TEST(ManifestTest, RoundTripPreservesSplitTokensAndPrecision) {
  DatasetManifest m;
  m.split_tag = SplitTag::kVal;
  m.videos["v"].duration_s = 100.123456789;
  m.videos["v"].clips.push_back(
      {"v", "c", {0.1 + 0.2, 19.6}, "caption with \"quotes\" and ünïcode", 42});
  m.actions["v"].push_back({"v", {1.0 / 3.0, 2.5}, "stir", 7});
  EXPECT_EQ(Parse(Write(m)), m);
}

TEST(ManifestTest, RoundTripIsIdentityOnRandomCorpora) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    testing::ManifestShape shape;
    shape.videos = 50;
    shape.with_tokens = trial % 2 == 0;
    const DatasetManifest m = testing::RandomManifest(rng, shape);
    EXPECT_EQ(Parse(Write(m)), m);
  }
}

TEST(ManifestTest, ParseIsInvariantToLineOrder) {
  std::mt19937_64 rng(5);
  testing::ManifestShape shape;
  shape.videos = 20;
  const DatasetManifest m = testing::RandomManifest(rng, shape);
  std::istringstream text(Write(m));
  std::vector<std::string> lines;
  for (std::string line; std::getline(text, line);) lines.push_back(line);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(lines.begin(), lines.end(), rng);
    std::string joined;
    for (const auto& l : lines) joined += l + "\n";
    EXPECT_EQ(Parse(joined), m);
  }
}

TEST(ManifestTest, WriteReportsByteCountAndSinkFailure) {
  std::ostringstream out;
  const std::size_t bytes = WriteManifest(Parse(kSmall), out);
  EXPECT_EQ(bytes, out.str().size());

  std::ostringstream broken;
  broken.setstate(std::ios::badbit);
  EXPECT_THROW(WriteManifest(Parse(kSmall), broken), IoError);
}

}  // namespace
}  // namespace narrkit
