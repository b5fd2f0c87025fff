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

#ifndef NARRKIT_TOOLS_CLI_H_
#define NARRKIT_TOOLS_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "narrkit/context.h"
#include "narrkit/embedcore.h"
#include "narrkit/matching.h"
#include "narrkit/stats.h"

namespace narrkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

// Every knob of a run. Values come from defaults, then an optional config
// file, then flags.
struct RunConfig {
  MatchThresholds thresholds;
  RegressionLossParams loss_params;
  PerturbationSpec perturbation;
  std::string shuffle_mode = "coords";
  int k = 2;
  std::size_t context_window = kDefaultContextWindow;
  StatsEdges edges;
  double jitter = 1e-6;
  std::string scale = "percent";
  std::string policy = "best-per-clip";
  std::string emit = "windows";
  std::string format = "binary";

  // Paths; "-" means standard output.
  std::string manifest;
  std::string matches;
  std::string judgments;
  std::string sequences;
  std::string assignment_out;
  std::string input;
  std::string std_from;
  std::string a;
  std::string b;
  std::string out = "-";

  std::uint64_t seed = 0;
  int threads = 1;
};

// Runs one command line (without the program name). Primary output goes to
// `out` unless --out names a file; diagnostics go to `err`. Returns 0 on
// success, 1 on a data or validation error and 2 on a usage error.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace narrkit::cli

#endif  // NARRKIT_TOOLS_CLI_H_
