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

#include "cli.h"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "gtest/gtest.h"
#include "narrkit/embedding.h"
#include "narrkit/manifest.h"
#include "testing/generators.h"

namespace narrkit::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = Run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void Spit(const fs::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("narrkit_cli_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
    std::mt19937_64 rng(42);
    testing::ManifestShape shape;
    shape.videos = 30;
    WriteManifestFile(testing::RandomManifest(rng, shape), Path("m.jsonl"));
    EmbeddingSet a = testing::GaussianSet(rng, 200, 8);
    for (std::size_t i = 0; i < a.size(); ++i) a[i].id = "a" + std::to_string(i);
    WriteEmbeddingFile(a, Path("a.emb"), EmbeddingFormat::kBinary);
    WriteEmbeddingFile(testing::GaussianSet(rng, 200, 8, 0.5), Path("b.emb"),
                       EmbeddingFormat::kBinary);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, MatchIsByteIdenticalAcrossRunsAndThreads) {
  const auto one = Invoke({"match", "--manifest", Path("m.jsonl")});
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_FALSE(one.out.empty());
  EXPECT_EQ(Invoke({"match", "--manifest", Path("m.jsonl")}).out, one.out);
  EXPECT_EQ(Invoke({"--threads", "8", "match", "--manifest", Path("m.jsonl")}).out,
            one.out);
}

TEST_F(CliTest, ValidateReportsInvertedInterval) {
  Spit(Path("bad.jsonl"),
       R"({"kind":"clip","video_id":"v","clip_id":"c","start_s":5,"end_s":2,"caption":"x"})"
       "\n");
  const auto r = Invoke({"validate", "--manifest", Path("bad.jsonl")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("parse_error"), std::string::npos);
  EXPECT_NE(r.err.find("'c'"), std::string::npos);
  EXPECT_EQ(Invoke({"validate", "--manifest", Path("m.jsonl")}).code, 0);
}

TEST_F(CliTest, FrechetOfFileWithItselfIsZero) {
  const auto r =
      Invoke({"metrics", "frechet", "--a", Path("a.emb"), "--b", Path("a.emb")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"metric\""), std::string::npos);
  EXPECT_NE(r.out.find("\"value\":0"), std::string::npos) << r.out;
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(Invoke({"match", "--manifest", Path("m.jsonl"), "--bogus"}).code, 2);
  EXPECT_EQ(Invoke({}).code, 2);
  EXPECT_EQ(Invoke({"match"}).code, 2);
  EXPECT_EQ(Invoke({"match", "--manifest", Path("m.jsonl"), "--iou-low", "0.7"}).code,
            2);
  EXPECT_EQ(Invoke({"windows", "--sequences", Path("x"), "--k", "4"}).code, 2);
  EXPECT_EQ(Invoke({"--help"}).code, 0);
}

TEST_F(CliTest, MissingInputIsDataError) {
  const auto r = Invoke({"stats", "--manifest", Path("nope.jsonl")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("nope.jsonl"), std::string::npos);
}

TEST_F(CliTest, EverySubcommandIsDeterministic) {
  ASSERT_EQ(Invoke({"--out", Path("matches.jsonl"), "match", "--manifest",
                    Path("m.jsonl")})
                .code,
            0);
  Spit(Path("judgments.jsonl"),
       R"({"item_id":"i1","rater_id":"r1","tier":"VeryMatch"}
{"item_id":"i1","rater_id":"r2","tier":"GoodMatch"}
{"item_id":"i2","rater_id":"r1","tier":"NotMatch"}
{"item_id":"i3","rating":5}
{"item_id":"i4","rating":1}
)");
  const std::vector<std::vector<std::string>> commands = {
      {"validate", "--manifest", Path("m.jsonl")},
      {"filter", "--manifest", Path("m.jsonl"), "--matches", Path("matches.jsonl")},
      {"stats", "--manifest", Path("m.jsonl")},
      {"score", "--judgments", Path("judgments.jsonl")},
      {"metrics", "clipt", "--text", Path("a.emb"), "--image", Path("b.emb")},
      {"metrics", "regloss", "--pred", Path("a.emb"), "--target", Path("b.emb")},
      {"metrics", "flowloss", "--pred", Path("a.emb"), "--target", Path("b.emb")},
      {"metrics", "frechet", "--a", Path("a.emb"), "--b", Path("b.emb")},
      {"--seed", "3", "perturb", "--in", Path("a.emb")},
      {"--seed", "3", "perturb", "--in", Path("a.emb"), "--shuffle-mode",
       "sequence", "--format", "text"},
      {"windows", "--manifest", Path("m.jsonl"), "--matches",
       Path("matches.jsonl"), "--k", "1"},
      {"windows", "--manifest", Path("m.jsonl"), "--matches",
       Path("matches.jsonl"), "--emit", "training"},
  };
  for (const auto& cmd : commands) {
    const auto first = Invoke(cmd);
    ASSERT_EQ(first.code, 0) << cmd[0] << ": " << first.err;
    if (cmd[0] != "validate") EXPECT_FALSE(first.out.empty()) << cmd[0];
    auto threaded = cmd;
    threaded.insert(threaded.begin(), {"--threads", "4"});
    EXPECT_EQ(Invoke(threaded).out, first.out) << cmd[0];
  }
}

TEST_F(CliTest, PerturbSeedChangesOutput) {
  const auto a = Invoke({"--seed", "1", "perturb", "--in", Path("a.emb")});
  const auto b = Invoke({"--seed", "2", "perturb", "--in", Path("a.emb")});
  ASSERT_EQ(a.code, 0);
  EXPECT_NE(a.out, b.out);
  const auto identity = Invoke({"perturb", "--in", Path("a.emb"), "--noise-scale",
                                "0", "--mask-rate", "0", "--no-shuffle"});
  ASSERT_EQ(identity.code, 0) << identity.err;
  EXPECT_EQ(identity.out, Slurp(Path("a.emb")));
}

TEST_F(CliTest, OutFlagWritesFile) {
  const auto r = Invoke({"--out", Path("stats.json"), "stats", "--manifest",
                         Path("m.jsonl")});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(Slurp(Path("stats.json")),
            Invoke({"stats", "--manifest", Path("m.jsonl")}).out);
}

TEST_F(CliTest, ConfigFileSetsDefaultsAndFlagsWin) {
  Spit(Path("cfg.ini"), "seed=9\n");
  const auto from_config =
      Invoke({"--config", Path("cfg.ini"), "perturb", "--in", Path("a.emb")});
  ASSERT_EQ(from_config.code, 0) << from_config.err;
  EXPECT_EQ(from_config.out,
            Invoke({"--seed", "9", "perturb", "--in", Path("a.emb")}).out);
  const auto overridden = Invoke(
      {"--config", Path("cfg.ini"), "--seed", "4", "perturb", "--in", Path("a.emb")});
  EXPECT_EQ(overridden.out,
            Invoke({"--seed", "4", "perturb", "--in", Path("a.emb")}).out);
}

TEST_F(CliTest, StatsEdgesOverride) {
  const auto r = Invoke({"stats", "--manifest", Path("m.jsonl"), "--clip-length-edges",
                         "0,10,20,30,40"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"clip_length_s.edges\": [\n    0.0,\n    10.0,"),
            std::string::npos)
      << r.out.substr(0, 400);
}

}  // namespace
}  // namespace narrkit::cli
