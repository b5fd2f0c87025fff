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

// Independent reference implementations. These deliberately avoid calling
// the library routines they are compared against.

#ifndef NARRKIT_TESTS_TESTING_ORACLES_H_
#define NARRKIT_TESTS_TESTING_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "narrkit/manifest.h"

namespace narrkit::testing {

using MatchKey = std::tuple<std::string, std::string, std::size_t>;

// Straight transcription of the action/caption matching pseudo code.
inline std::set<MatchKey> NaiveMatch(const DatasetManifest& m,
                                     double max_start_diff = 5.0,
                                     double iou_low = 0.2,
                                     double iou_high = 0.5) {
  auto iou = [](double s1, double e1, double s2, double e2) {
    const double intersection = std::max(0.0, std::min(e1, e2) - std::max(s1, s2));
    const double uni = std::max(e1, e2) - std::min(s1, s2);
    return uni > 0 ? intersection / uni : 0.0;
  };
  std::set<MatchKey> out;
  for (const auto& [vid, video] : m.videos) {
    if (m.actions.count(vid) == 0) continue;
    const auto& actions = m.actions.at(vid);
    for (const auto& c : video.clips) {
      const double sc = c.interval.start_s, ec = c.interval.end_s;
      for (std::size_t a = 0; a < actions.size(); ++a) {
        const double sa = actions[a].interval.start_s;
        const double ea = actions[a].interval.end_s;
        const double start_diff = std::fabs(sc - sa);
        const double v = iou(sc, ec, sa, ea);
        if ((start_diff < max_start_diff && ec > ea && v > iou_low) ||
            v > iou_high) {
          out.emplace(vid, c.clip_id, a);
        }
      }
    }
  }
  return out;
}

// Regression loss written out term by term.
inline double NaiveRegressionLoss(const std::vector<double>& p,
                                  const std::vector<double>& t, double alpha,
                                  double beta) {
  double dot = 0, pp = 0, tt = 0, sq = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    dot += p[i] * t[i];
    pp += p[i] * p[i];
    tt += t[i] * t[i];
    sq += (p[i] - t[i]) * (p[i] - t[i]);
  }
  return alpha * (1.0 - dot / (std::sqrt(pp) * std::sqrt(tt))) +
         beta * sq / static_cast<double>(p.size());
}

inline std::vector<double> CentralDifference(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    x[i] = xi + h;
    const double up = f(x);
    x[i] = xi - h;
    const double down = f(x);
    x[i] = xi;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// Relative error per component, with magnitudes below `floor` compared
// absolutely.
inline double MaxRelativeError(const std::vector<double>& a,
                               const std::vector<double>& b,
                               double floor = 1e-4) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::fabs(a[i]), std::fabs(b[i]), floor});
    worst = std::max(worst, std::fabs(a[i] - b[i]) / scale);
  }
  return worst;
}

// Bin-by-bin count with a linear scan.
inline std::vector<std::size_t> NaiveBinCounts(const std::vector<double>& values,
                                               const std::vector<double>& edges,
                                               std::size_t& under,
                                               std::size_t& over) {
  std::vector<std::size_t> counts(edges.size() - 1, 0);
  under = over = 0;
  for (double v : values) {
    if (v < edges.front()) {
      ++under;
      continue;
    }
    bool placed = false;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      if (edges[i] <= v && v < edges[i + 1]) {
        ++counts[i];
        placed = true;
        break;
      }
    }
    if (!placed) ++over;
  }
  return counts;
}

}  // namespace narrkit::testing

#endif  // NARRKIT_TESTS_TESTING_ORACLES_H_
