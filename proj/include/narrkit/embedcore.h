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

#ifndef NARRKIT_EMBEDCORE_H_
#define NARRKIT_EMBEDCORE_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "narrkit/embedding.h"

namespace narrkit {

// Throws DataError on dimension mismatch or a zero-norm input.
double CosineSimilarity(std::span<const double> a, std::span<const double> b);

// Weights of the combined cosine + mean-squared-error latent regression loss.
struct RegressionLossParams {
  double alpha = 1.0;
  double beta = 1.0;

  // Throws DataError unless alpha, beta >= 0 and alpha + beta > 0.
  void Validate() const;
};

struct RegressionLoss {
  double total = 0.0;
  // alpha * (1 - cos(pred, target))
  double cosine_term = 0.0;
  // beta * mean((pred_i - target_i)^2)
  double mse_term = 0.0;
};

RegressionLoss ComputeRegressionLoss(std::span<const double> pred,
                                     std::span<const double> target,
                                     const RegressionLossParams& params);

// Analytic gradient of ComputeRegressionLoss(...).total with respect to pred:
//
//   -alpha * (t / (|p||t|) - (p.t) p / (|p|^3 |t|)) + (2 beta / N) (p - t)
std::vector<double> RegressionLossGradient(std::span<const double> pred,
                                           std::span<const double> target,
                                           const RegressionLossParams& params);

// Per-dimension sample standard deviation with the n - 1 denominator.
// Throws DataError for fewer than two vectors.
std::vector<double> PopulationStd(const EmbeddingSet& set);

// Noisy-condition regularization z' = S(M(z + eps)). The defaults are the
// fine-tuning settings: Gaussian noise at 0.5 of the population std, 25%
// masking and shuffling.
struct PerturbationSpec {
  // Multiplier on the per-dimension population std.
  double noise_scale = 0.5;
  // Independent per-coordinate probability of zeroing.
  double mask_rate = 0.25;
  // Applies a uniform random permutation of the coordinates.
  bool shuffle = true;
  std::uint64_t seed = 0;

  static PerturbationSpec Identity() { return {0.0, 0.0, false, 0}; }

  // Throws DataError unless noise_scale >= 0 and mask_rate is in [0, 1].
  void Validate() const;
};

// Adds noise, then masks, then shuffles, drawing from a generator seeded with
// spec.seed. Steps with a zero rate are skipped, so the identity spec returns
// the input bit for bit.
EmbeddingVector Perturb(const EmbeddingVector& z,
                        std::span<const double> std_basis,
                        const PerturbationSpec& spec);

// Mixes a run seed with an item key into an independent stream seed.
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view key);

// Applies Perturb to each vector with seed DeriveSeed(spec.seed, key), where
// key is the vector id or, when absent, its decimal index. Results do not
// depend on `threads`.
EmbeddingSet PerturbSet(const EmbeddingSet& set,
                        std::span<const double> std_basis,
                        const PerturbationSpec& spec, int threads = 1);

// Sequence-level alternative to coordinate shuffling: permutes the order of
// the embeddings themselves.
EmbeddingSet ShuffleSequence(const EmbeddingSet& set, std::uint64_t seed);

EmbeddingVector RescaleLatent(const EmbeddingVector& z, double factor);
// i.i.d. N(0, sigma^2) added to every coordinate. sigma == 0 is the identity.
EmbeddingVector AddNoise(const EmbeddingVector& z, double sigma,
                         std::uint64_t seed);

struct GaussianMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

// Sample mean and unbiased covariance. Throws DataError for fewer than two
// vectors.
GaussianMoments FitMoments(const EmbeddingSet& set);

// Frechet (2-Wasserstein) distance between Gaussians:
//
//   |mu_a - mu_b|^2 + Tr(C_a + C_b - 2 (C_a^1/2 C_b C_a^1/2)^1/2)
//
// Square roots come from symmetric eigendecompositions with negative
// eigenvalues clamped to zero. If a covariance is not numerically PSD,
// jitter * I is added to both covariances and the computation is retried.
// Throws DataError on dimension mismatch, asymmetric or non-PSD covariances,
// or a non-finite intermediate (the message names the stage).
double FrechetDistance(const GaussianMoments& a, const GaussianMoments& b,
                       double jitter = 1e-6);

enum class ScoreScale { kRaw, kPercent };

// Mean cosine between index-paired text and image embeddings, optionally
// multiplied by 100.
double ClipTScore(const EmbeddingSet& text, const EmbeddingSet& image,
                  ScoreScale scale);

struct FlowSample {
  EmbeddingVector predicted_drift;
  EmbeddingVector target_drift;
};

// Mean over samples of |predicted - target|^2.
double FlowMatchingLoss(const std::vector<FlowSample>& samples);

}  // namespace narrkit

#endif  // NARRKIT_EMBEDCORE_H_
