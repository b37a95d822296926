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

#include <cmath>
#include <cstdint>
#include <string>

#include "rpkit/error.hpp"
#include "rpkit/matrix.hpp"
#include "rpkit/rng.hpp"

// Random projection: sampling the three entry distributions, applying the
// k x d map with the 1/sqrt(k) convention, the dimension bound, and the
// empirical distortion audit.

namespace rpkit {

// ---------------------------------------------------------------------------
// Specs and kinds
// ---------------------------------------------------------------------------

// All three kinds have entry variance exactly 1: standard normal, +-1 fair
// coin, and sqrt(3)-scaled ternary with a 2/3 zero mass.
enum class ProjectionKind { gaussian, sign, sparse_ternary };

inline const char* to_string(ProjectionKind kind) {
  switch (kind) {
    case ProjectionKind::gaussian: return "gaussian";
    case ProjectionKind::sign: return "sign";
    case ProjectionKind::sparse_ternary: return "sparse_ternary";
  }
  throw std::invalid_argument("unknown projection kind");
}

inline ProjectionKind projection_kind_from_string(const std::string& s) {
  if (s == "gaussian") return ProjectionKind::gaussian;
  if (s == "sign") return ProjectionKind::sign;
  if (s == "sparse_ternary") return ProjectionKind::sparse_ternary;
  throw std::invalid_argument("unknown projection kind '" + s + "'");
}

enum class ScalingMode { raw, unit };

inline const char* to_string(ScalingMode mode) {
  return mode == ScalingMode::raw ? "raw" : "unit";
}

inline ScalingMode scaling_mode_from_string(const std::string& s) {
  if (s == "raw") return ScalingMode::raw;
  if (s == "unit") return ScalingMode::unit;
  throw std::invalid_argument("unknown scaling mode '" + s + "'");
}

struct ProjectionSpec {
  ProjectionKind kind = ProjectionKind::gaussian;
  std::size_t input_dim = 0;   // d
  std::size_t output_dim = 0;  // k
  std::uint64_t seed = 0;
  // Unit scaling divides by sqrt(k), making projected distances directly
  // comparable to originals. Raw leaves the bare product for consumers
  // that scale themselves.
  ScalingMode scaling = ScalingMode::unit;

  void validate() const {
    if (input_dim == 0) {
      throw std::invalid_argument("projection spec: input_dim must be >= 1");
    }
    if (output_dim == 0) {
      throw std::invalid_argument("projection spec: output_dim must be >= 1");
    }
  }

  // k > d is legal, the map just stops reducing. Callers surface this as
  // a warning.
  bool non_reducing() const { return output_dim > input_dim; }
};

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

// Entry block of the given kind, row-major, variance 1 per entry.
inline Matrix sample_entry_matrix(RngStream& rng, ProjectionKind kind,
                                  std::size_t rows, std::size_t cols) {
  const std::size_t n = rows * cols;
  Vector data;
  switch (kind) {
    case ProjectionKind::gaussian:
      data = sample_gaussian(rng, n);
      break;
    case ProjectionKind::sign:
      data = sample_discrete(rng, {{1.0, 0.5}, {-1.0, 0.5}}, n);
      break;
    case ProjectionKind::sparse_ternary: {
      const double r3 = std::sqrt(3.0);
      data = sample_discrete(
          rng, {{r3, 1.0 / 6.0}, {0.0, 2.0 / 3.0}, {-r3, 1.0 / 6.0}}, n);
      break;
    }
    default:
      throw std::invalid_argument("unknown projection kind");
  }
  return Matrix(rows, cols, std::move(data));
}

class ProjectionMatrix {
 public:
  ProjectionMatrix(ProjectionSpec spec, Matrix m)
      : spec_(spec), m_(std::move(m)) {
    spec_.validate();
    if (m_.rows() != spec_.output_dim || m_.cols() != spec_.input_dim) {
      throw std::invalid_argument(
          "projection matrix must be " +
          detail::shape_str(spec_.output_dim, spec_.input_dim) + ", got " +
          detail::shape_str(m_.rows(), m_.cols()));
    }
    if (spec_.kind == ProjectionKind::sign) {
      for (double v : m_.data()) {
        if (v != 1.0 && v != -1.0) {
          throw std::invalid_argument(
              "sign projection entries must be +-1, found " +
              std::to_string(v));
        }
      }
    } else if (spec_.kind == ProjectionKind::sparse_ternary) {
      const double r3 = std::sqrt(3.0);
      for (double v : m_.data()) {
        if (std::abs(v) > 1e-12 && std::abs(std::abs(v) - r3) > 1e-12) {
          throw std::invalid_argument(
              "sparse ternary projection entries must be 0 or +-sqrt(3), "
              "found " + std::to_string(v));
        }
      }
    }
  }

  const ProjectionSpec& spec() const { return spec_; }
  const Matrix& matrix() const { return m_; }

 private:
  ProjectionSpec spec_;
  Matrix m_;
};

// Deterministic per spec: the identical spec regenerates the identical
// matrix, which is what lets projections be stored as seeds.
inline ProjectionMatrix sample_projection(const ProjectionSpec& spec) {
  spec.validate();
  RngStream rng(spec.seed, 0);
  return ProjectionMatrix(
      spec, sample_entry_matrix(rng, spec.kind, spec.output_dim,
                                spec.input_dim));
}

// ---------------------------------------------------------------------------
// Applying the map
// ---------------------------------------------------------------------------

// Rows of data are points. Row i of the result is P v_i, divided by
// sqrt(k) under unit scaling.
inline Matrix project(const Matrix& data, const ProjectionMatrix& p) {
  if (data.cols() != p.spec().input_dim) {
    throw std::invalid_argument(
        "project: data has " + std::to_string(data.cols()) +
        " columns but the projection expects " +
        std::to_string(p.spec().input_dim));
  }
  Matrix out = matmul(data, transpose(p.matrix()));
  if (p.spec().scaling == ScalingMode::unit) {
    const double root_k = std::sqrt(static_cast<double>(p.spec().output_dim));
    for (double& v : out.data()) v /= root_k;
  }
  return out;
}

inline Vector project(const Vector& v, const ProjectionMatrix& p) {
  if (v.size() != p.spec().input_dim) {
    throw std::invalid_argument(
        "project: vector has length " + std::to_string(v.size()) +
        " but the projection expects " + std::to_string(p.spec().input_dim));
  }
  Vector out = matvec(p.matrix(), v);
  if (p.spec().scaling == ScalingMode::unit) {
    const double root_k = std::sqrt(static_cast<double>(p.spec().output_dim));
    for (double& x : out) x /= root_k;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dimension bound and failure probability
// ---------------------------------------------------------------------------

// The annulus concentration constant is not a universal number; it is
// configuration with a deliberately conservative default.
inline constexpr double kDefaultAnnulusC = 0.25;

struct JlConfig {
  double annulus_c = kDefaultAnnulusC;

  void validate() const {
    if (!(annulus_c > 0.0) || !std::isfinite(annulus_c)) {
      throw std::invalid_argument("annulus constant must be positive");
    }
  }
};

// ceil(3 ln n / (c eps^2)): the embedding dimension at which all n(n-1)/2
// pairwise distances survive within 1 +- eps with high probability.
inline std::size_t jl_min_dimension(std::size_t n_points, double eps,
                                    const JlConfig& cfg = {}) {
  cfg.validate();
  if (n_points < 2) {
    throw std::invalid_argument(
        "jl_min_dimension: need at least 2 points, the bound degenerates at "
        "n = " + std::to_string(n_points));
  }
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("jl_min_dimension: eps must lie in (0, 1)");
  }
  const double raw = 3.0 * std::log(static_cast<double>(n_points)) /
                     (cfg.annulus_c * eps * eps);
  if (!(raw < 9e15)) {
    throw std::invalid_argument(
        "jl_min_dimension: bound overflows a sensible dimension count");
  }
  return static_cast<std::size_t>(std::ceil(raw));
}

// 3 e^{-c eps^2 k}, clipped into [0, 1].
inline double failure_bound(double eps, std::size_t k,
                            const JlConfig& cfg = {}) {
  cfg.validate();
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("failure_bound: eps must lie in (0, 1)");
  }
  if (k == 0) {
    throw std::invalid_argument("failure_bound: k must be >= 1");
  }
  const double b =
      3.0 * std::exp(-cfg.annulus_c * eps * eps * static_cast<double>(k));
  return std::min(b, 1.0);
}

// ---------------------------------------------------------------------------
// Distortion audit
// ---------------------------------------------------------------------------

struct DistortionReport {
  double epsilon = 0.0;
  std::size_t pair_count = 0;
  double pass_fraction = 0.0;
  // Worst ratio excursions over pairs with nonzero original distance:
  // max(ratio) - 1 above, 1 - min(ratio) below, floored at 0.
  double max_expansion = 0.0;
  double max_contraction = 0.0;
};

// Checks every unordered pair against the sandwich
// (1-eps) |vi - vj|  <=  |f(vi) - f(vj)|  <=  (1+eps) |vi - vj|,
// which presumes the projection used unit scaling. Pairs at original
// distance < 1e-12 pass iff the projected distance is < 1e-12 too; a ratio
// is meaningless there.
inline DistortionReport distortion_audit(const Matrix& original,
                                         const Matrix& projected,
                                         double eps) {
  if (original.rows() != projected.rows()) {
    throw std::invalid_argument(
        "distortion_audit: row counts disagree, " +
        std::to_string(original.rows()) + " vs " +
        std::to_string(projected.rows()));
  }
  if (original.rows() < 2) {
    throw std::invalid_argument(
        "distortion_audit: need at least 2 points, got " +
        std::to_string(original.rows()));
  }
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("distortion_audit: eps must lie in (0, 1)");
  }

  auto row_distance = [](const Matrix& m, std::size_t i, std::size_t j) {
    double acc = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double d = m(i, c) - m(j, c);
      acc += d * d;
    }
    return std::sqrt(acc);
  };

  const std::size_t n = original.rows();
  DistortionReport report;
  report.epsilon = eps;
  report.pair_count = n * (n - 1) / 2;
  std::size_t passes = 0;
  double max_ratio = 1.0;
  double min_ratio = 1.0;
  bool saw_ratio = false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d_orig = row_distance(original, i, j);
      const double d_proj = row_distance(projected, i, j);
      if (d_orig < 1e-12) {
        if (d_proj < 1e-12) ++passes;
        continue;
      }
      const double ratio = d_proj / d_orig;
      if (!saw_ratio) {
        max_ratio = min_ratio = ratio;
        saw_ratio = true;
      } else {
        max_ratio = std::max(max_ratio, ratio);
        min_ratio = std::min(min_ratio, ratio);
      }
      if (d_proj >= (1.0 - eps) * d_orig && d_proj <= (1.0 + eps) * d_orig) {
        ++passes;
      }
    }
  }
  report.pass_fraction =
      static_cast<double>(passes) / static_cast<double>(report.pair_count);
  report.max_expansion = saw_ratio ? std::max(0.0, max_ratio - 1.0) : 0.0;
  report.max_contraction = saw_ratio ? std::max(0.0, 1.0 - min_ratio) : 0.0;
  return report;
}

}  // namespace rpkit
