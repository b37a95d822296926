// Copyright 2026 The rpkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "rpkit/error.hpp"
#include "rpkit/io.hpp"
#include "rpkit/linalg.hpp"
#include "rpkit/matrix.hpp"
#include "rpkit/projection.hpp"
#include "rpkit/rng.hpp"

// Multiplicative perturbation for privacy-preserving data mining. Records
// are columns of an m x n matrix; a k x m key matrix R with i.i.d.
// zero-mean entries of variance sigma_r^2 maps them to U = R X / (sqrt(k)
// sigma_r). Inner products, and through them distances, cosines, and
// correlations of unit-norm records, remain estimable from U alone, while
// a key kept secret leaves the records underdetermined.

namespace rpkit::privacy {

// In privacy mode the reduced dimension must stay below the attribute
// count, otherwise a leaked key recovers the records exactly (attack 1).
// Test mode lifts that restriction for invertible-system demonstrations.
enum class PerturbMode { privacy, test };

struct PerturbationKey {
  Matrix R;
  double sigma_r = 1.0;
  ProjectionKind kind = ProjectionKind::gaussian;
  std::uint64_t seed = 0;

  std::size_t k() const { return R.rows(); }
  std::size_t m() const { return R.cols(); }
};

struct PerturbedDataset {
  Matrix U;
  double sigma_r = 1.0;
  // True when every source column had unit norm; the distance, cosine and
  // correlation estimators are only meaningful in that regime.
  bool column_norms_normalized = false;

  std::size_t k() const { return U.rows(); }
  std::size_t n() const { return U.cols(); }
};

namespace detail {

inline void check_sigma(double sigma_r, const std::string& who) {
  if (!(sigma_r > 0.0) || !std::isfinite(sigma_r)) {
    throw std::invalid_argument(who + ": sigma_r must be a positive real");
  }
}

// Entries are unit-variance draws scaled by sigma_r, so every kind ends up
// with variance sigma_r^2.
inline Matrix scaled_entries(RngStream& rng, ProjectionKind kind,
                             std::size_t rows, std::size_t cols,
                             double sigma_r) {
  Matrix e = sample_entry_matrix(rng, kind, rows, cols);
  if (sigma_r != 1.0) {
    Matrix scaled(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) scaled(i, j) = sigma_r * e(i, j);
    }
    return scaled;
  }
  return e;
}

}  // namespace detail

inline PerturbationKey make_key(std::size_t m, std::size_t k, double sigma_r,
                                std::uint64_t seed,
                                ProjectionKind kind = ProjectionKind::gaussian,
                                PerturbMode mode = PerturbMode::privacy) {
  if (m == 0 || k == 0) {
    throw std::invalid_argument("make_key: dimensions must be >= 1");
  }
  detail::check_sigma(sigma_r, "make_key");
  if (mode == PerturbMode::privacy && k >= m) {
    throw std::invalid_argument(
        "make_key: k (" + std::to_string(k) + ") must be below m (" +
        std::to_string(m) +
        ") in privacy mode; at k >= m attack 1 solves R X' = sqrt(k) "
        "sigma_r U exactly once the key leaks");
  }
  RngStream rng(seed, 0);
  return {detail::scaled_entries(rng, kind, k, m, sigma_r), sigma_r, kind,
          seed};
}

// Applies an existing key, so a second dataset can share the R that
// perturbed the first.
inline PerturbedDataset perturb(const Matrix& x, const PerturbationKey& key) {
  if (x.rows() != key.m()) {
    throw std::invalid_argument(
        "perturb: data has " + std::to_string(x.rows()) +
        " attribute rows but the key expects " + std::to_string(key.m()));
  }
  Matrix u = matmul(key.R, x);
  const double denom = std::sqrt(static_cast<double>(key.k())) * key.sigma_r;
  for (std::size_t i = 0; i < u.rows(); ++i) {
    for (std::size_t j = 0; j < u.cols(); ++j) u(i, j) /= denom;
  }
  bool normalized = true;
  for (std::size_t j = 0; j < x.cols() && normalized; ++j) {
    normalized = std::abs(norm(x.col(j)) - 1.0) <= 1e-9;
  }
  return {std::move(u), key.sigma_r, normalized};
}

inline std::pair<PerturbedDataset, PerturbationKey> perturb(
    const Matrix& x, std::size_t k, double sigma_r, std::uint64_t seed,
    ProjectionKind kind = ProjectionKind::gaussian,
    PerturbMode mode = PerturbMode::privacy) {
  PerturbationKey key = make_key(x.rows(), k, sigma_r, seed, kind, mode);
  PerturbedDataset u = perturb(x, key);
  return {std::move(u), std::move(key)};
}

// Max absolute deviation of the trial-averaged R^T R from its expectation
// k sigma_r^2 I. Shrinks like 1/sqrt(trials); returned for assertion.
inline double gram_expectation_check(std::size_t k, std::size_t m,
                                     double sigma_r, std::size_t trials,
                                     std::uint64_t seed,
                                     ProjectionKind kind =
                                         ProjectionKind::gaussian) {
  if (k == 0 || m == 0) {
    throw std::invalid_argument(
        "gram_expectation_check: dimensions must be >= 1");
  }
  detail::check_sigma(sigma_r, "gram_expectation_check");
  if (trials < 100) {
    throw std::invalid_argument(
        "gram_expectation_check: need at least 100 trials");
  }
  std::vector<double> acc(m * m, 0.0);
  for (std::size_t t = 0; t < trials; ++t) {
    RngStream rng(seed, t);
    const Matrix r = detail::scaled_entries(rng, kind, k, m, sigma_r);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        double s = 0.0;
        for (std::size_t row = 0; row < k; ++row) s += r(row, i) * r(row, j);
        acc[i * m + j] += s;
      }
    }
  }
  const double target = static_cast<double>(k) * sigma_r * sigma_r;
  double worst = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double avg = acc[i * m + j] / static_cast<double>(trials);
      const double want = (i == j) ? target : 0.0;
      worst = std::max(worst, std::abs(avg - want));
    }
  }
  return worst;
}

// U^T V, the unbiased estimate of X^T Y for datasets sharing one key.
inline Matrix estimate_inner(const PerturbedDataset& u,
                             const PerturbedDataset& v) {
  if (u.k() != v.k()) {
    throw std::invalid_argument(
        "estimate_inner: datasets disagree on k (" + std::to_string(u.k()) +
        " vs " + std::to_string(v.k()) + ")");
  }
  if (u.sigma_r != v.sigma_r) {
    throw std::invalid_argument(
        "estimate_inner: datasets disagree on sigma_r");
  }
  return matmul(transpose(u.U), v.U);
}

// The cosine, correlation and distance estimators below all derive from
// one clipped inner product, so for unit-norm sources they are consistent
// by construction.
inline double estimate_cosine(const Vector& u, const Vector& v) {
  return std::clamp(dot(u, v), -1.0, 1.0);
}

inline double estimate_correlation(const Vector& u, const Vector& v) {
  return estimate_cosine(u, v);
}

inline double estimate_distance_squared(const Vector& u, const Vector& v) {
  return 2.0 - 2.0 * estimate_cosine(u, v);
}

inline double estimate_distance(const Vector& u, const Vector& v) {
  return std::sqrt(estimate_distance_squared(u, v));
}

struct EstimatorErrorStats {
  std::size_t trials = 0;
  double mean_error = 0.0;
  double variance = 0.0;
  double variance_bound = 0.0;
};

// Empirical mean and variance of u^T v - x^T y across fresh keys, with the
// theoretical variance ceiling 2/k attached for comparison.
inline EstimatorErrorStats estimator_error_stats(
    const Vector& x, const Vector& y, std::size_t k, double sigma_r,
    std::size_t trials, std::uint64_t seed,
    ProjectionKind kind = ProjectionKind::gaussian) {
  if (x.size() != y.size() || x.empty()) {
    throw std::invalid_argument(
        "estimator_error_stats: vectors must share a nonzero length");
  }
  if (std::abs(norm(x) - 1.0) > 1e-9 || std::abs(norm(y) - 1.0) > 1e-9) {
    throw std::invalid_argument(
        "estimator_error_stats: x and y must have unit norm");
  }
  if (k == 0) throw std::invalid_argument("estimator_error_stats: k >= 1");
  detail::check_sigma(sigma_r, "estimator_error_stats");
  if (trials < 1000) {
    throw std::invalid_argument(
        "estimator_error_stats: need at least 1000 trials");
  }
  const std::size_t m = x.size();
  const double denom = std::sqrt(static_cast<double>(k)) * sigma_r;
  const double truth = dot(x, y);
  std::vector<double> errs(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    RngStream rng(seed, t);
    const Matrix r = detail::scaled_entries(rng, kind, k, m, sigma_r);
    Vector u(k, 0.0);
    Vector v(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      double su = 0.0;
      double sv = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        su += r(i, j) * x[j];
        sv += r(i, j) * y[j];
      }
      u[i] = su / denom;
      v[i] = sv / denom;
    }
    errs[t] = dot(u, v) - truth;
  }
  double mean = 0.0;
  for (const double e : errs) mean += e;
  mean /= static_cast<double>(trials);
  double var = 0.0;
  for (const double e : errs) var += (e - mean) * (e - mean);
  var /= static_cast<double>(trials - 1);
  return {trials, mean, var, 2.0 / static_cast<double>(k)};
}

// ---------------------------------------------------------------------------
// Attacks
// ---------------------------------------------------------------------------

struct AttackExactResult {
  // Per-column least squares solution of R X' = sqrt(k) sigma_r U; the
  // minimum-norm candidate when the system is underdetermined.
  Matrix reconstruction;
  // False when any column admits infinitely many solutions, which is
  // exactly the k < m regime with a full-row-rank key.
  bool unique = true;
};

inline AttackExactResult attack_exact(const PerturbedDataset& u,
                                      const PerturbationKey& key) {
  if (u.k() != key.k()) {
    throw std::invalid_argument(
        "attack_exact: dataset and key disagree on k");
  }
  if (u.sigma_r != key.sigma_r) {
    throw std::invalid_argument(
        "attack_exact: dataset and key disagree on sigma_r");
  }
  const double scale =
      std::sqrt(static_cast<double>(key.k())) * key.sigma_r;
  Matrix recon(key.m(), u.n());
  bool unique = true;
  for (std::size_t j = 0; j < u.n(); ++j) {
    Vector y = u.U.col(j);
    for (double& e : y) e *= scale;
    const LeastSquaresResult ls = least_squares(key.R, y);
    unique = unique && !ls.rank_deficient;
    for (std::size_t i = 0; i < key.m(); ++i) recon(i, j) = ls.solution[i];
  }
  return {std::move(recon), unique};
}

struct AttackEstimateStats {
  std::size_t trials = 0;
  // Per source attribute, across independently guessed keys.
  Vector element_means;
  Vector element_variances;
};

// Attack 2: the adversary knows only the key's distribution, draws a guess
// R-hat per trial, and maps u back through it. The estimate is unbiased
// around zero with per-element variance |x|^2 / k, so nothing about x
// beyond its norm leaks.
inline AttackEstimateStats attack_estimate(const Vector& u,
                                           ProjectionKind kind,
                                           double sigma_hat, std::size_t k,
                                           std::size_t m, std::size_t trials,
                                           std::uint64_t seed) {
  if (u.size() != k || k == 0) {
    throw std::invalid_argument(
        "attack_estimate: u must have length k >= 1");
  }
  if (m == 0) throw std::invalid_argument("attack_estimate: m must be >= 1");
  detail::check_sigma(sigma_hat, "attack_estimate");
  if (trials == 0) {
    throw std::invalid_argument("attack_estimate: need at least 1 trial");
  }
  const double denom = std::sqrt(static_cast<double>(k)) * sigma_hat;
  std::vector<double> draws(trials * m);
  for (std::size_t t = 0; t < trials; ++t) {
    RngStream rng(seed, t);
    const Matrix rhat = detail::scaled_entries(rng, kind, k, m, sigma_hat);
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t row = 0; row < k; ++row) s += rhat(row, i) * u[row];
      draws[t * m + i] = s / denom;
    }
  }
  Vector means(m, 0.0);
  for (std::size_t t = 0; t < trials; ++t) {
    for (std::size_t i = 0; i < m; ++i) means[i] += draws[t * m + i];
  }
  for (double& e : means) e /= static_cast<double>(trials);
  Vector vars(m, 0.0);
  if (trials > 1) {
    for (std::size_t t = 0; t < trials; ++t) {
      for (std::size_t i = 0; i < m; ++i) {
        const double d = draws[t * m + i] - means[i];
        vars[i] += d * d;
      }
    }
    for (double& e : vars) e /= static_cast<double>(trials - 1);
  }
  return {trials, std::move(means), std::move(vars)};
}

// ---------------------------------------------------------------------------
// Applications on perturbed columns
// ---------------------------------------------------------------------------

// Lloyd's iterations over the columns of any matrix. Initial centroids are
// distinct seeded column picks; ties assign to the lower centroid index; a
// cluster left empty keeps its centroid. Stops when assignments repeat.
inline std::vector<std::uint32_t> lloyd_columns(const Matrix& data,
                                                std::size_t clusters,
                                                std::size_t max_iters,
                                                std::uint64_t seed) {
  const std::size_t n = data.cols();
  if (clusters == 0) {
    throw std::invalid_argument("lloyd_columns: clusters must be >= 1");
  }
  if (clusters > n) {
    throw std::invalid_argument(
        "lloyd_columns: " + std::to_string(clusters) +
        " clusters exceed " + std::to_string(n) + " columns");
  }
  if (max_iters == 0) {
    throw std::invalid_argument("lloyd_columns: max_iters must be >= 1");
  }
  const std::size_t dim = data.rows();
  RngStream rng(seed, 0);
  std::vector<char> used(n, 0);
  std::vector<Vector> centroids;
  centroids.reserve(clusters);
  while (centroids.size() < clusters) {
    const auto idx = static_cast<std::size_t>(rng.next_u64() % n);
    if (!used[idx]) {
      used[idx] = 1;
      centroids.push_back(data.col(idx));
    }
  }
  std::vector<std::uint32_t> assign(n, 0);
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    bool changed = (iter == 0);
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < clusters; ++c) {
        double d = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
          const double diff = data(i, j) - centroids[c][i];
          d += diff * diff;
        }
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[j] != best) {
        assign[j] = static_cast<std::uint32_t>(best);
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<Vector> sums(clusters, Vector(dim, 0.0));
    std::vector<std::size_t> counts(clusters, 0);
    for (std::size_t j = 0; j < n; ++j) {
      ++counts[assign[j]];
      for (std::size_t i = 0; i < dim; ++i) sums[assign[j]][i] += data(i, j);
    }
    for (std::size_t c = 0; c < clusters; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t i = 0; i < dim; ++i) {
        centroids[c][i] = sums[c][i] / static_cast<double>(counts[c]);
      }
    }
  }
  return assign;
}

inline std::vector<std::uint32_t> kmeans_perturbed(const PerturbedDataset& u,
                                                   std::size_t clusters,
                                                   std::size_t max_iters,
                                                   std::uint64_t seed) {
  return lloyd_columns(u.U, clusters, max_iters, seed);
}

struct PerceptronResult {
  // Lives in the perturbed k-dimensional space.
  Vector weights;
  double training_accuracy = 0.0;
};

// Standard perceptron over perturbed columns with labels in {-1, +1}.
// Sample order is reshuffled each epoch from the seed; a zero activation
// predicts +1, so epochs = 0 reports the zero classifier's accuracy, which
// is the +1 label fraction.
inline PerceptronResult perceptron_perturbed(const PerturbedDataset& u,
                                             const std::vector<int>& labels,
                                             std::size_t epochs,
                                             std::uint64_t seed) {
  const std::size_t n = u.n();
  if (labels.size() != n) {
    throw std::invalid_argument(
        "perceptron_perturbed: " + std::to_string(labels.size()) +
        " labels for " + std::to_string(n) + " columns");
  }
  for (const int l : labels) {
    if (l != 1 && l != -1) {
      throw std::invalid_argument(
          "perceptron_perturbed: labels must be +1 or -1");
    }
  }
  const std::size_t k = u.k();
  Vector w(k, 0.0);
  auto predict = [&](std::size_t j) {
    double act = 0.0;
    for (std::size_t i = 0; i < k; ++i) act += w[i] * u.U(i, j);
    return act >= 0.0 ? 1 : -1;
  };
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    RngStream rng(seed, epoch);
    for (std::size_t i = n; i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng.next_u64() % i);
      std::swap(order[i - 1], order[j]);
    }
    for (const std::size_t j : order) {
      if (predict(j) != labels[j]) {
        for (std::size_t i = 0; i < k; ++i) {
          w[i] += labels[j] * u.U(i, j);
        }
      }
    }
  }
  std::size_t correct = 0;
  for (std::size_t j = 0; j < n; ++j) correct += predict(j) == labels[j];
  return {std::move(w),
          static_cast<double>(correct) / static_cast<double>(n)};
}

// ---------------------------------------------------------------------------
// Key files
// ---------------------------------------------------------------------------

inline constexpr char kKeyMagic[4] = {'R', 'P', 'K', 'K'};

// "RPKK" k:u32 m:u32 sigma_r:f64 kind:u8 seed:u64, then R row-major f64,
// everything little-endian. Emitting a key defeats the privacy posture, so
// callers should reach for this deliberately.
inline void save_key(const std::string& path, const PerturbationKey& key) {
  std::string out;
  out.append(kKeyMagic, 4);
  io::detail::put_u32(out, static_cast<std::uint32_t>(key.k()));
  io::detail::put_u32(out, static_cast<std::uint32_t>(key.m()));
  io::detail::put_f64(out, key.sigma_r);
  out.push_back(static_cast<char>(key.kind));
  io::detail::put_u64(out, key.seed);
  for (std::size_t i = 0; i < key.k(); ++i) {
    for (std::size_t j = 0; j < key.m(); ++j) {
      io::detail::put_f64(out, key.R(i, j));
    }
  }
  io::detail::write_file_bytes(path, out);
}

inline PerturbationKey load_key(const std::string& path) {
  const std::string b = io::detail::read_file_bytes(path);
  if (b.size() < 4 || b.compare(0, 4, kKeyMagic, 4) != 0) {
    throw io_error(path + ": bad magic at byte 0");
  }
  constexpr std::size_t header = 4 + 4 + 4 + 8 + 1 + 8;
  if (b.size() < header) {
    throw io_error(path + ": truncated at byte " + std::to_string(b.size()));
  }
  const std::uint32_t k = io::detail::get_u32(b, 4);
  const std::uint32_t m = io::detail::get_u32(b, 8);
  const double sigma_r = io::detail::get_f64(b, 12);
  const auto kind_byte = static_cast<unsigned char>(b[20]);
  const std::uint64_t seed = io::detail::get_u64(b, 21);
  if (k == 0 || m == 0) {
    throw io_error(path + ": zero dimension in header");
  }
  if (!(sigma_r > 0.0) || !std::isfinite(sigma_r)) {
    throw io_error(path + ": sigma_r in header is not a positive real");
  }
  if (kind_byte > 2) {
    throw io_error(path + ": unknown distribution tag " +
                   std::to_string(kind_byte));
  }
  const std::size_t want =
      header + 8 * static_cast<std::size_t>(k) * m;
  if (b.size() < want) {
    throw io_error(path + ": truncated at byte " + std::to_string(b.size()) +
                   ", expected " + std::to_string(want));
  }
  if (b.size() > want) {
    throw io_error(path + ": trailing bytes after entry " +
                   std::to_string(static_cast<std::size_t>(k) * m - 1));
  }
  std::vector<double> entries(static_cast<std::size_t>(k) * m);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::size_t off = header + 8 * i;
    const double v = io::detail::get_f64(b, off);
    if (!std::isfinite(v)) {
      throw io_error(path + ": non-finite entry at byte " +
                     std::to_string(off));
    }
    entries[i] = v;
  }
  return {Matrix(k, m, entries), sigma_r,
          static_cast<ProjectionKind>(kind_byte), seed};
}

}  // namespace rpkit::privacy
