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

#include "narrkit/embedcore.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "narrkit/errors.h"
#include "parallel.h"

namespace narrkit {
namespace {

void CheckSameDim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DataError(std::string(what) + ": dimension mismatch (" +
                    std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
  if (a == 0) throw DataError(std::string(what) + ": empty vector");
}

double Dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double Norm(std::span<const double> a) { return std::sqrt(Dot(a, a)); }

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void RequireFinite(const Eigen::MatrixXd& m, const char* stage) {
  if (!m.allFinite()) {
    throw DataError(std::string("frechet distance: non-finite value in ") +
                    stage);
  }
}

// Symmetric eigendecomposition. Fails (returns false) when an eigenvalue is
// below -tolerance, i.e. the matrix is not numerically PSD.
bool SymmetricEigen(const Eigen::MatrixXd& m, const char* stage,
                    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& solver) {
  solver.compute(m);
  if (solver.info() != Eigen::Success) {
    throw DataError(std::string("frechet distance: eigendecomposition of ") +
                    stage + " did not converge");
  }
  RequireFinite(solver.eigenvalues(), stage);
  const double scale =
      std::max(1.0, solver.eigenvalues().cwiseAbs().maxCoeff());
  return solver.eigenvalues().minCoeff() >= -1e-9 * scale;
}

void CheckMoments(const GaussianMoments& m, std::size_t dim, const char* name) {
  if (static_cast<std::size_t>(m.mean.size()) != dim ||
      static_cast<std::size_t>(m.covariance.rows()) != dim ||
      static_cast<std::size_t>(m.covariance.cols()) != dim) {
    throw DataError(std::string("frechet distance: moments ") + name +
                    " have inconsistent dimensions");
  }
  RequireFinite(m.mean, "input mean");
  RequireFinite(m.covariance, "input covariance");
  const double scale = std::max(1.0, m.covariance.cwiseAbs().maxCoeff());
  if ((m.covariance - m.covariance.transpose()).cwiseAbs().maxCoeff() >
      1e-9 * scale) {
    throw DataError(std::string("frechet distance: covariance ") + name +
                    " is not symmetric");
  }
}

}  // namespace

double CosineSimilarity(std::span<const double> a, std::span<const double> b) {
  CheckSameDim(a.size(), b.size(), "cosine similarity");
  const double na = Norm(a);
  const double nb = Norm(b);
  if (!(na > 0.0) || !(nb > 0.0)) {
    throw DataError("cosine similarity: zero-norm input");
  }
  return std::clamp(Dot(a, b) / (na * nb), -1.0, 1.0);
}

void RegressionLossParams::Validate() const {
  if (!(alpha >= 0.0 && beta >= 0.0 && std::isfinite(alpha) &&
        std::isfinite(beta) && alpha + beta > 0.0)) {
    throw DataError("regression loss weights need alpha, beta >= 0 and "
                    "alpha + beta > 0");
  }
}

RegressionLoss ComputeRegressionLoss(std::span<const double> pred,
                                     std::span<const double> target,
                                     const RegressionLossParams& params) {
  params.Validate();
  CheckSameDim(pred.size(), target.size(), "regression loss");
  RegressionLoss loss;
  loss.cosine_term = params.alpha * (1.0 - CosineSimilarity(pred, target));
  double sq = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    sq += d * d;
  }
  loss.mse_term = params.beta * sq / static_cast<double>(pred.size());
  loss.total = loss.cosine_term + loss.mse_term;
  return loss;
}

std::vector<double> RegressionLossGradient(std::span<const double> pred,
                                           std::span<const double> target,
                                           const RegressionLossParams& params) {
  params.Validate();
  CheckSameDim(pred.size(), target.size(), "regression loss gradient");
  const double np = Norm(pred);
  const double nt = Norm(target);
  if (!(np > 0.0) || !(nt > 0.0)) {
    throw DataError("regression loss gradient: zero-norm input");
  }
  const double dot = Dot(pred, target);
  const double inv = 1.0 / (np * nt);
  const double radial = dot / (np * np * np * nt);
  const double mse_scale = 2.0 * params.beta / static_cast<double>(pred.size());

  std::vector<double> grad(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double dcos = target[i] * inv - pred[i] * radial;
    grad[i] = -params.alpha * dcos + mse_scale * (pred[i] - target[i]);
  }
  return grad;
}

std::vector<double> PopulationStd(const EmbeddingSet& set) {
  if (set.size() < 2) {
    throw DataError("population std needs at least two embeddings");
  }
  const std::size_t dim = CheckedDimension(set);
  std::vector<double> mean(dim, 0.0);
  for (const auto& v : set) {
    for (std::size_t j = 0; j < dim; ++j) mean[j] += v.values[j];
  }
  for (double& m : mean) m /= static_cast<double>(set.size());
  std::vector<double> var(dim, 0.0);
  for (const auto& v : set) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = v.values[j] - mean[j];
      var[j] += d * d;
    }
  }
  std::vector<double> out(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    out[j] = std::sqrt(var[j] / static_cast<double>(set.size() - 1));
  }
  return out;
}

void PerturbationSpec::Validate() const {
  if (!(noise_scale >= 0.0 && std::isfinite(noise_scale))) {
    throw DataError("noise_scale must be a non-negative number");
  }
  if (!(mask_rate >= 0.0 && mask_rate <= 1.0)) {
    throw DataError("mask_rate must lie in [0, 1]");
  }
}

EmbeddingVector Perturb(const EmbeddingVector& z,
                        std::span<const double> std_basis,
                        const PerturbationSpec& spec) {
  spec.Validate();
  if (std_basis.size() != z.dim()) {
    throw DataError("perturb: std basis has dimension " +
                    std::to_string(std_basis.size()) + ", embedding has " +
                    std::to_string(z.dim()));
  }
  std::mt19937_64 rng(spec.seed);
  EmbeddingVector out = z;
  auto& x = out.values;

  if (spec.noise_scale > 0.0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] += normal(rng) * spec.noise_scale * std_basis[i];
    }
  }
  if (spec.mask_rate > 0.0) {
    std::bernoulli_distribution drop(spec.mask_rate);
    for (double& v : x) {
      if (drop(rng)) v = 0.0;
    }
  }
  if (spec.shuffle) std::shuffle(x.begin(), x.end(), rng);
  return out;
}

std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view key) {
  // FNV-1a over the key, then mixed with the run seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return SplitMix64(SplitMix64(seed) ^ h);
}

EmbeddingSet PerturbSet(const EmbeddingSet& set,
                        std::span<const double> std_basis,
                        const PerturbationSpec& spec, int threads) {
  spec.Validate();
  EmbeddingSet out(set.size());
  internal::ParallelFor(set.size(), threads, [&](std::size_t i) {
    const std::string key = set[i].id ? *set[i].id : std::to_string(i);
    PerturbationSpec item = spec;
    item.seed = DeriveSeed(spec.seed, key);
    out[i] = Perturb(set[i], std_basis, item);
  });
  return out;
}

EmbeddingSet ShuffleSequence(const EmbeddingSet& set, std::uint64_t seed) {
  EmbeddingSet out = set;
  std::mt19937_64 rng(seed);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

EmbeddingVector RescaleLatent(const EmbeddingVector& z, double factor) {
  if (!std::isfinite(factor)) throw DataError("scale factor must be finite");
  EmbeddingVector out = z;
  for (double& v : out.values) v *= factor;
  return out;
}

EmbeddingVector AddNoise(const EmbeddingVector& z, double sigma,
                         std::uint64_t seed) {
  if (!(sigma >= 0.0 && std::isfinite(sigma))) {
    throw DataError("noise sigma must be a non-negative number");
  }
  EmbeddingVector out = z;
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  for (double& v : out.values) v += normal(rng);
  return out;
}

GaussianMoments FitMoments(const EmbeddingSet& set) {
  if (set.size() < 2) throw DataError("moments need at least two embeddings");
  const auto dim = static_cast<Eigen::Index>(CheckedDimension(set));
  const auto n = static_cast<Eigen::Index>(set.size());

  GaussianMoments m;
  m.mean = Eigen::VectorXd::Zero(dim);
  for (const auto& v : set) {
    m.mean += Eigen::Map<const Eigen::VectorXd>(v.values.data(), dim);
  }
  m.mean /= static_cast<double>(n);

  // Accumulate centered outer products in row blocks to bound memory.
  constexpr Eigen::Index kBlock = 1024;
  m.covariance = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd block;
  for (Eigen::Index start = 0; start < n; start += kBlock) {
    const Eigen::Index rows = std::min(kBlock, n - start);
    block.resize(rows, dim);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto& values = set[static_cast<std::size_t>(start + r)].values;
      block.row(r) =
          Eigen::Map<const Eigen::RowVectorXd>(values.data(), dim) -
          m.mean.transpose();
    }
    m.covariance.noalias() += block.transpose() * block;
  }
  m.covariance /= static_cast<double>(n - 1);
  return m;
}

double FrechetDistance(const GaussianMoments& a, const GaussianMoments& b,
                       double jitter) {
  const auto dim = static_cast<std::size_t>(a.mean.size());
  if (static_cast<std::size_t>(b.mean.size()) != dim) {
    throw DataError("frechet distance: dimension mismatch (" +
                    std::to_string(dim) + " vs " +
                    std::to_string(b.mean.size()) + ")");
  }
  if (dim == 0) throw DataError("frechet distance: empty moments");
  CheckMoments(a, dim, "a");
  CheckMoments(b, dim, "b");
  if (!(jitter >= 0.0 && std::isfinite(jitter))) {
    throw DataError("frechet distance: jitter must be non-negative");
  }

  const double mean_term = (a.mean - b.mean).squaredNorm();
  if (!std::isfinite(mean_term)) {
    throw DataError("frechet distance: non-finite value in mean difference");
  }

  const auto n = static_cast<Eigen::Index>(dim);
  const auto identity = Eigen::MatrixXd::Identity(n, n);
  for (double offset : {0.0, jitter}) {
    const Eigen::MatrixXd ca = a.covariance + offset * identity;
    const Eigen::MatrixXd cb = b.covariance + offset * identity;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_a;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_b;
    if (!SymmetricEigen(ca, "covariance a", eig_a) ||
        !SymmetricEigen(cb, "covariance b", eig_b)) {
      continue;
    }
    const Eigen::VectorXd root_values =
        eig_a.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd sqrt_a = eig_a.eigenvectors() *
                                   root_values.asDiagonal() *
                                   eig_a.eigenvectors().transpose();
    RequireFinite(sqrt_a, "square root of covariance a");

    Eigen::MatrixXd product = sqrt_a * cb * sqrt_a;
    product = 0.5 * (product + product.transpose());
    RequireFinite(product, "covariance product");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_p;
    SymmetricEigen(product, "covariance product", eig_p);
    const double trace_sqrt = eig_p.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();

    const double distance =
        mean_term + ca.trace() + cb.trace() - 2.0 * trace_sqrt;
    if (!std::isfinite(distance)) {
      throw DataError("frechet distance: non-finite value in trace term");
    }
    return std::max(0.0, distance);
  }
  throw DataError(
      "frechet distance: covariance is not positive semidefinite even after "
      "adding jitter");
}

double ClipTScore(const EmbeddingSet& text, const EmbeddingSet& image,
                  ScoreScale scale) {
  if (text.size() != image.size()) {
    throw DataError("clip-t score: " + std::to_string(text.size()) +
                    " text embeddings vs " + std::to_string(image.size()) +
                    " image embeddings");
  }
  if (text.empty()) throw DataError("clip-t score: no pairs");
  double sum = 0.0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    sum += CosineSimilarity(text[i].values, image[i].values);
  }
  const double mean = sum / static_cast<double>(text.size());
  return scale == ScoreScale::kPercent ? 100.0 * mean : mean;
}

double FlowMatchingLoss(const std::vector<FlowSample>& samples) {
  if (samples.empty()) throw DataError("flow matching loss: no samples");
  const std::size_t dim = samples.front().predicted_drift.dim();
  double sum = 0.0;
  for (const FlowSample& s : samples) {
    CheckSameDim(s.predicted_drift.dim(), s.target_drift.dim(),
                 "flow matching loss");
    CheckSameDim(s.predicted_drift.dim(), dim, "flow matching loss");
    double sq = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double d = s.predicted_drift.values[i] - s.target_drift.values[i];
      sq += d * d;
    }
    sum += sq;
  }
  return sum / static_cast<double>(samples.size());
}

}  // namespace narrkit
