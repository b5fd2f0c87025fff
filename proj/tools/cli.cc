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

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "narrkit/embedding.h"
#include "narrkit/errors.h"
#include "narrkit/manifest.h"
#include "narrkit/scoring.h"

namespace narrkit::cli {
namespace {

using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Primary output sink: a file when a path is given, otherwise the caller's
// stream.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(
        path, std::ios::out | std::ios::binary | std::ios::trunc);
    if (!*file_) throw IoError("cannot open '" + path + "' for writing");
    stream_ = file_.get();
  }

  std::ostream& stream() { return *stream_; }

  void Finish() {
    stream_->flush();
    if (!*stream_) throw IoError("write failure");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

std::ifstream OpenOrThrow(const std::string& path) {
  std::ifstream in(path, std::ios::in | std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

void WriteDocument(const Json& doc, const RunConfig& config, std::ostream& out) {
  Output sink(config.out, out);
  sink.stream() << doc.dump(2) << '\n';
  sink.Finish();
}

void Validate(const RunConfig& config) {
  try {
    config.thresholds.Validate();
    config.loss_params.Validate();
    config.perturbation.Validate();
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
  if (config.threads < 1) throw UsageError("--threads must be at least 1");
}

// --- subcommands -----------------------------------------------------------

int RunValidate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Output sink(config.out, out);
  DatasetManifest manifest;
  try {
    manifest = ReadManifestFile(config.manifest);
  } catch (const ParseError& e) {
    sink.stream() << Json{{"kind", "parse_error"},
                          {"line", e.line()},
                          {"field", e.field()},
                          {"message", e.what()}}
                         .dump()
                  << '\n';
    sink.Finish();
    err << "error: " << config.manifest << ": " << e.what() << '\n';
    return kExitDataError;
  }
  const auto violations = ValidateManifest(manifest);
  for (const Violation& v : violations) {
    Json record = {{"kind", ViolationKindName(v.kind)}, {"video_id", v.video_id}};
    if (v.clip_id) record["clip_id"] = *v.clip_id;
    if (v.action_index) record["action_index"] = *v.action_index;
    record["message"] = v.message;
    sink.stream() << record.dump() << '\n';
  }
  sink.Finish();
  err << "validate: " << manifest.videos.size() << " videos, "
      << manifest.clip_count() << " clips, " << manifest.action_count()
      << " actions, " << violations.size() << " violations\n";
  return violations.empty() ? kExitOk : kExitDataError;
}

int RunMatch(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const DatasetManifest manifest = ReadManifestFile(config.manifest);
  const auto matches =
      MatchDataset(manifest, config.thresholds, config.threads);
  Output sink(config.out, out);
  WriteMatches(matches, sink.stream());
  sink.Finish();
  err << "match: " << matches.size() << " matches over "
      << manifest.clip_count() << " clips\n";
  return kExitOk;
}

FilterPolicy ToPolicy(const std::string& name) {
  return name == "keep-all" ? FilterPolicy::kKeepAll
                            : FilterPolicy::kBestPerClip;
}

FilterResult LoadFiltered(const RunConfig& config) {
  const DatasetManifest manifest = ReadManifestFile(config.manifest);
  auto in = OpenOrThrow(config.matches);
  const auto matches = ParseMatches(in);
  return FilterMatched(manifest, matches, ToPolicy(config.policy));
}

int RunFilter(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const FilterResult result = LoadFiltered(config);
  Output sink(config.out, out);
  WriteManifest(result.manifest, sink.stream());
  sink.Finish();
  if (!config.assignment_out.empty()) {
    Output assignment(config.assignment_out, out);
    for (const auto& [key, indices] : result.assignment) {
      assignment.stream() << Json{{"video_id", key.first},
                                  {"clip_id", key.second},
                                  {"action_indices", indices}}
                                 .dump()
                          << '\n';
    }
    assignment.Finish();
  }
  err << "filter: kept " << result.manifest.clip_count() << " clips in "
      << result.manifest.videos.size() << " videos\n";
  return kExitOk;
}

int RunStats(const RunConfig& config, std::ostream& out, std::ostream&) {
  const DatasetManifest manifest = ReadManifestFile(config.manifest);
  WriteDocument(BuildStatsReport(manifest, config.edges), config, out);
  return kExitOk;
}

int RunScore(const RunConfig& config, std::ostream& out, std::ostream&) {
  auto in = OpenOrThrow(config.judgments);
  const JudgmentFile file = ParseJudgments(in);
  if (file.tiers.empty() && file.ratings.empty()) {
    throw DataError("no judgments in '" + config.judgments + "'");
  }
  Json doc = Json::object();
  if (!file.tiers.empty()) {
    const TierAggregate agg = AggregateTiers(file.tiers);
    Json counts = Json::object();
    for (MatchTier tier : kAllTiers) {
      counts[TierName(tier)] = agg.per_tier_counts[static_cast<std::size_t>(tier)];
    }
    doc["tiers"] = {{"judgments", file.tiers.size()},
                    {"items", agg.per_item_means.size()},
                    {"mean_score", agg.mean_score},
                    {"judgment_mean", agg.judgment_mean},
                    {"per_tier_counts", counts},
                    {"per_rater_means", agg.per_rater_means}};
  }
  if (!file.ratings.empty()) {
    const RatingAggregate agg = AggregateRatings(file.ratings);
    doc["ratings"] = {{"count", file.ratings.size()},
                      {"mean_rating", agg.mean_rating},
                      {"hallucination_rate", agg.hallucination_rate},
                      {"distribution", agg.distribution}};
  }
  WriteDocument(doc, config, out);
  return kExitOk;
}

void WriteMetric(const Json& doc, const RunConfig& config, std::ostream& out) {
  Output sink(config.out, out);
  sink.stream() << doc.dump() << '\n';
  sink.Finish();
}

int RunFrechet(const RunConfig& config, std::ostream& out, std::ostream&) {
  const auto a = FitMoments(ReadEmbeddingFile(config.a));
  const auto b = FitMoments(ReadEmbeddingFile(config.b));
  WriteMetric({{"metric", "frechet"},
               {"value", FrechetDistance(a, b, config.jitter)}},
              config, out);
  return kExitOk;
}

int RunClipT(const RunConfig& config, std::ostream& out, std::ostream&) {
  const auto text = ReadEmbeddingFile(config.a);
  const auto image = ReadEmbeddingFile(config.b);
  const auto scale =
      config.scale == "raw" ? ScoreScale::kRaw : ScoreScale::kPercent;
  WriteMetric({{"metric", "clipt"},
               {"scale", config.scale},
               {"pairs", text.size()},
               {"value", ClipTScore(text, image, scale)}},
              config, out);
  return kExitOk;
}

std::pair<EmbeddingSet, EmbeddingSet> LoadPairs(const RunConfig& config) {
  auto pred = ReadEmbeddingFile(config.a);
  auto target = ReadEmbeddingFile(config.b);
  if (pred.size() != target.size()) {
    throw DataError("prediction and target files hold " +
                    std::to_string(pred.size()) + " and " +
                    std::to_string(target.size()) + " embeddings");
  }
  if (pred.empty()) throw DataError("no embedding pairs");
  return {std::move(pred), std::move(target)};
}

int RunRegLoss(const RunConfig& config, std::ostream& out, std::ostream&) {
  const auto [pred, target] = LoadPairs(config);
  double total = 0.0, cosine = 0.0, mse = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const RegressionLoss loss = ComputeRegressionLoss(
        pred[i].values, target[i].values, config.loss_params);
    total += loss.total;
    cosine += loss.cosine_term;
    mse += loss.mse_term;
  }
  const auto n = static_cast<double>(pred.size());
  WriteMetric({{"metric", "regloss"},
               {"alpha", config.loss_params.alpha},
               {"beta", config.loss_params.beta},
               {"pairs", pred.size()},
               {"value", total / n},
               {"cosine_term", cosine / n},
               {"mse_term", mse / n}},
              config, out);
  return kExitOk;
}

int RunFlowLoss(const RunConfig& config, std::ostream& out, std::ostream&) {
  auto [pred, target] = LoadPairs(config);
  std::vector<FlowSample> samples;
  samples.reserve(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    samples.push_back({std::move(pred[i]), std::move(target[i])});
  }
  WriteMetric({{"metric", "flowloss"},
               {"samples", samples.size()},
               {"value", FlowMatchingLoss(samples)}},
              config, out);
  return kExitOk;
}

int RunPerturb(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const EmbeddingSet input = ReadEmbeddingFile(config.input);
  if (input.empty()) throw DataError("no embeddings in '" + config.input + "'");
  const EmbeddingSet reference =
      config.std_from.empty() ? input : ReadEmbeddingFile(config.std_from);
  const std::vector<double> basis = PopulationStd(reference);

  PerturbationSpec spec = config.perturbation;
  spec.seed = config.seed;
  const bool sequence_shuffle = config.shuffle_mode == "sequence";
  if (sequence_shuffle) spec.shuffle = false;

  EmbeddingSet result = PerturbSet(input, basis, spec, config.threads);
  if (sequence_shuffle && config.perturbation.shuffle) {
    result = ShuffleSequence(result, DeriveSeed(config.seed, "sequence"));
  }

  Output sink(config.out, out);
  if (config.format == "text") {
    WriteEmbeddingsText(result, sink.stream());
  } else {
    WriteEmbeddingsBinary(result, sink.stream());
  }
  sink.Finish();
  err << "perturb: " << result.size() << " embeddings, noise_scale "
      << spec.noise_scale << ", mask_rate " << spec.mask_rate << ", shuffle "
      << (config.perturbation.shuffle ? config.shuffle_mode : "off") << '\n';
  return kExitOk;
}

int RunWindows(const RunConfig& config, std::ostream& out, std::ostream& err) {
  std::vector<NarrativeSequence> sequences;
  if (!config.sequences.empty()) {
    auto in = OpenOrThrow(config.sequences);
    sequences = ParseSequences(in, config.context_window);
  } else {
    if (config.manifest.empty() || config.matches.empty()) {
      throw UsageError("windows needs --sequences or --manifest with --matches");
    }
    const FilterResult filtered = LoadFiltered(config);
    sequences = SequencesFromManifest(filtered.manifest, filtered.assignment,
                                      config.context_window);
  }

  Output sink(config.out, out);
  std::size_t emitted = 0;
  std::size_t skipped = 0;
  for (const NarrativeSequence& seq : sequences) {
    if (config.emit == "training") {
      const auto records = ExportTrainingRecords(seq);
      WriteTrainingRecords(records, sink.stream());
      emitted += records.size();
      continue;
    }
    if (seq.steps.size() < 2 * static_cast<std::size_t>(config.k)) {
      ++skipped;
      continue;
    }
    const auto windows = BuildWindows(seq, config.k);
    WriteWindows(windows, sink.stream());
    emitted += windows.size();
  }
  sink.Finish();
  err << "windows: " << emitted << " records from " << sequences.size()
      << " sequences";
  if (skipped > 0) {
    err << " (" << skipped << " shorter than " << 2 * config.k
        << " steps skipped)";
  }
  err << '\n';
  return kExitOk;
}

// --- command-line definition ---------------------------------------------

void AddEdges(CLI::App* cmd, const std::string& name,
              std::vector<double>& edges, const std::string& what) {
  cmd->add_option("--" + name + "-edges", edges,
                  "Histogram edges for " + what + " (comma separated)")
      ->delimiter(',')
      ->capture_default_str();
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  RunConfig config;
  int (*action)(const RunConfig&, std::ostream&, std::ostream&) = nullptr;

  CLI::App app{"Curation and evaluation tools for long narrative video corpora",
               "narrkit"};
  app.set_config("--config", "", "Flat key=value config file; flags win");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", config.seed, "Seed for every random stream")
      ->capture_default_str();
  app.add_option("--threads", config.threads,
                 "Worker threads; never changes output bytes")
      ->capture_default_str();
  app.add_option("--out", config.out, "Primary output path ('-' = stdout)")
      ->capture_default_str();

  auto* validate = app.add_subcommand("validate", "Check manifest invariants");
  validate->add_option("--manifest", config.manifest, "Manifest file")
      ->required();
  validate->callback([&] { action = RunValidate; });

  auto* match = app.add_subcommand(
      "match", "Match captioned clips to ASR action spans by time overlap");
  match->add_option("--manifest", config.manifest, "Manifest file")->required();
  match->add_option("--max-start-diff", config.thresholds.max_start_diff_s,
                    "Rule A: |clip start - action start| must be below this")
      ->capture_default_str();
  match->add_option("--iou-low", config.thresholds.iou_low,
                    "Rule A IoU threshold. The reference pseudo code uses "
                    "0.2; the prose description states 0.25")
      ->capture_default_str();
  match->add_option("--iou-high", config.thresholds.iou_high,
                    "Rule B IoU threshold")
      ->capture_default_str();
  match->callback([&] { action = RunMatch; });

  auto* filter = app.add_subcommand(
      "filter", "Drop unmatched clips and assign actions to the rest");
  filter->add_option("--manifest", config.manifest, "Manifest file")
      ->required();
  filter->add_option("--matches", config.matches, "Match file")->required();
  filter->add_option("--policy", config.policy, "Multi-match policy")
      ->check(CLI::IsMember({"keep-all", "best-per-clip"}))
      ->capture_default_str();
  filter->add_option("--assignment-out", config.assignment_out,
                     "Also write the clip -> action assignment here");
  filter->callback([&] { action = RunFilter; });

  auto* stats = app.add_subcommand("stats", "Profile a manifest");
  stats->add_option("--manifest", config.manifest, "Manifest file")->required();
  AddEdges(stats, "video-length", config.edges.video_length_s,
           "video lengths (s)");
  AddEdges(stats, "clip-length", config.edges.clip_length_s,
           "clip lengths (s)");
  AddEdges(stats, "clips-per-video", config.edges.clips_per_video,
           "clips per video");
  AddEdges(stats, "action-words", config.edges.action_words,
           "action word counts");
  AddEdges(stats, "caption-words", config.edges.caption_words,
           "caption word counts");
  AddEdges(stats, "action-tokens", config.edges.action_tokens,
           "action token counts");
  AddEdges(stats, "caption-tokens", config.edges.caption_tokens,
           "caption token counts");
  stats->callback([&] { action = RunStats; });

  auto* score = app.add_subcommand(
      "score", "Aggregate human tier judgments and captioner ratings");
  score->add_option("--judgments", config.judgments, "Judgment file")
      ->required();
  score->callback([&] { action = RunScore; });

  auto* metrics = app.add_subcommand("metrics", "Embedding metrics");
  metrics->require_subcommand(1);
  auto* frechet = metrics->add_subcommand(
      "frechet", "Frechet distance between Gaussian fits of two sets");
  frechet->add_option("--a", config.a, "First embedding file")->required();
  frechet->add_option("--b", config.b, "Second embedding file")->required();
  frechet->add_option("--jitter", config.jitter,
                      "Diagonal offset used when a covariance is not PSD")
      ->capture_default_str();
  frechet->callback([&] { action = RunFrechet; });

  auto* clipt = metrics->add_subcommand(
      "clipt", "Mean cosine of index-paired text/image embeddings");
  clipt->add_option("--text", config.a, "Text embedding file")->required();
  clipt->add_option("--image", config.b, "Image embedding file")->required();
  clipt->add_option("--scale", config.scale, "raw or percent (x100)")
      ->check(CLI::IsMember({"raw", "percent"}))
      ->capture_default_str();
  clipt->callback([&] { action = RunClipT; });

  auto* regloss = metrics->add_subcommand(
      "regloss", "Mean cosine + MSE regression loss over paired embeddings");
  regloss->add_option("--pred", config.a, "Predicted embeddings")->required();
  regloss->add_option("--target", config.b, "Target embeddings")->required();
  regloss->add_option("--alpha", config.loss_params.alpha, "Cosine weight")
      ->capture_default_str();
  regloss->add_option("--beta", config.loss_params.beta, "MSE weight")
      ->capture_default_str();
  regloss->callback([&] { action = RunRegLoss; });

  auto* flowloss = metrics->add_subcommand(
      "flowloss", "Mean squared L2 distance between paired drift fields");
  flowloss->add_option("--pred", config.a, "Predicted drifts")->required();
  flowloss->add_option("--target", config.b, "Target drifts")->required();
  flowloss->callback([&] { action = RunFlowLoss; });

  auto* perturb = app.add_subcommand(
      "perturb", "Apply noise, masking and shuffling to embeddings");
  perturb->add_option("--in", config.input, "Input embedding file")
      ->required();
  perturb->add_option("--std-from", config.std_from,
                      "Reference population for the noise std (default: "
                      "the input itself)");
  perturb->add_option("--noise-scale", config.perturbation.noise_scale,
                      "Noise std as a multiple of the population std")
      ->capture_default_str();
  perturb->add_option("--mask-rate", config.perturbation.mask_rate,
                      "Probability of zeroing each coordinate")
      ->capture_default_str();
  perturb->add_flag("--shuffle,!--no-shuffle", config.perturbation.shuffle,
                    "Shuffle after masking")
      ->capture_default_str();
  perturb->add_option("--shuffle-mode", config.shuffle_mode,
                      "coords: permute coordinates of each embedding; "
                      "sequence: permute embedding order")
      ->check(CLI::IsMember({"coords", "sequence"}))
      ->capture_default_str();
  perturb->add_option("--format", config.format, "Output format")
      ->check(CLI::IsMember({"binary", "text"}))
      ->capture_default_str();
  perturb->callback([&] { action = RunPerturb; });

  auto* windows = app.add_subcommand(
      "windows", "Export rolling conditioning windows or training records");
  windows->add_option("--sequences", config.sequences, "Step record file");
  windows->add_option("--manifest", config.manifest,
                      "Manifest (with --matches) to derive sequences from");
  windows->add_option("--matches", config.matches, "Match file");
  windows->add_option("--policy", config.policy, "Multi-match policy")
      ->check(CLI::IsMember({"keep-all", "best-per-clip"}))
      ->capture_default_str();
  windows->add_option("--k", config.k, "Context length")
      ->check(CLI::Range(kMinContextLength, kMaxContextLength))
      ->capture_default_str();
  windows->add_option("--context-window", config.context_window,
                      "Steps kept per training record")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  windows->add_option("--emit", config.emit, "windows or training")
      ->check(CLI::IsMember({"windows", "training"}))
      ->capture_default_str();
  windows->callback([&] { action = RunWindows; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    Validate(config);
    if (action == nullptr) throw UsageError("no subcommand given");
    return action(config, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
}

}  // namespace narrkit::cli
