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
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "rpkit/error.hpp"
#include "rpkit/matrix.hpp"

namespace rpkit {

// ---------------------------------------------------------------------------
// Singular values, one-sided Jacobi
// ---------------------------------------------------------------------------

struct SvdOptions {
  // A sweep visits every column pair once. 30 is generous at desk scale;
  // random 64-column matrices settle in well under half that.
  int max_sweeps = 30;
  // Pair (p, q) counts as orthogonal when |b_p . b_q| <= tol * |b_p| |b_q|.
  double tol = 1e-15;
};

inline constexpr std::size_t kMaxSvdSide = 64;

// Singular values of a, nonincreasing. The matrix is consumed column by
// column: plane rotations orthogonalize column pairs until a full sweep
// leaves every pair orthogonal, then the column norms are the singular
// values. Runs on the transpose when that is the tall orientation.
inline Vector singular_values(const Matrix& a, const SvdOptions& opts = {}) {
  if (std::min(a.rows(), a.cols()) > kMaxSvdSide) {
    throw std::invalid_argument(
        "singular_values: min dimension " +
        std::to_string(std::min(a.rows(), a.cols())) + " exceeds " +
        std::to_string(kMaxSvdSide));
  }
  if (opts.max_sweeps < 0) {
    throw std::invalid_argument("singular_values: max_sweeps must be >= 0");
  }
  const bool tall = a.rows() >= a.cols();
  const std::size_t n = tall ? a.cols() : a.rows();
  const std::size_t m = tall ? a.rows() : a.cols();
  std::vector<Vector> cols(n, Vector(m));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      cols[j][i] = tall ? a(i, j) : a(j, i);
    }
  }

  auto pair_converged = [&](std::size_t p, std::size_t q) {
    const double alpha = dot(cols[p], cols[p]);
    const double beta = dot(cols[q], cols[q]);
    const double gamma = dot(cols[p], cols[q]);
    return std::abs(gamma) <= opts.tol * std::sqrt(alpha * beta);
  };

  bool converged = false;
  for (int sweep = 0; sweep < opts.max_sweeps && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = dot(cols[p], cols[p]);
        const double beta = dot(cols[q], cols[q]);
        const double gamma = dot(cols[p], cols[q]);
        if (std::abs(gamma) <= opts.tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double vp = cols[p][i];
          const double vq = cols[q][i];
          cols[p][i] = c * vp - s * vq;
          cols[q][i] = s * vp + c * vq;
        }
      }
    }
    converged = !rotated;
  }
  if (!converged) {
    // A last scan, cheaper than a sweep: the final rotations may already
    // have settled everything.
    converged = true;
    for (std::size_t p = 0; p + 1 < n && converged; ++p) {
      for (std::size_t q = p + 1; q < n && converged; ++q) {
        converged = pair_converged(p, q);
      }
    }
    if (!converged) {
      throw numerical_error("singular_values: no convergence within " +
                            std::to_string(opts.max_sweeps) + " sweeps");
    }
  }

  Vector sv(n);
  for (std::size_t j = 0; j < n; ++j) sv[j] = norm(cols[j]);
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  return sv;
}

// ---------------------------------------------------------------------------
// Least squares, column-pivoted Householder QR
// ---------------------------------------------------------------------------

struct LeastSquaresResult {
  Vector solution;
  double residual_norm = 0.0;
  // Numerical rank fell below the column count. The returned solution is
  // then the minimum-norm minimizer of the rank-truncated problem.
  bool rank_deficient = false;
};

// Rank cutoff relative to the largest pivot column norm. Normal equations
// square the condition number, so the factorization works on a directly.
inline constexpr double kRankTolerance = 1e-10;

namespace detail {

// Householder reflector for x = column[j..]: returns alpha with the column
// mapped to alpha * e1. v overwrites x (v = x - alpha e1), vtv its square.
struct Reflector {
  double alpha = 0.0;
  double vtv = 0.0;
};

inline Reflector make_reflector(Vector& v) {
  double nrm = 0.0;
  for (double x : v) nrm += x * x;
  nrm = std::sqrt(nrm);
  Reflector r;
  r.alpha = v[0] > 0.0 ? -nrm : nrm;
  v[0] -= r.alpha;
  r.vtv = 0.0;
  for (double x : v) r.vtv += x * x;
  return r;
}

}  // namespace detail

inline LeastSquaresResult least_squares(const Matrix& a, const Vector& y) {
  if (y.size() != a.rows()) {
    throw std::invalid_argument("least_squares: matrix is " +
                                detail::shape_str(a.rows(), a.cols()) +
                                " but y has length " +
                                std::to_string(y.size()));
  }
  const std::size_t r = a.rows();
  const std::size_t c = a.cols();
  Matrix R = a;
  Vector qty = y;
  std::vector<std::size_t> perm(c);
  std::iota(perm.begin(), perm.end(), 0);

  const std::size_t steps = std::min(r, c);
  std::size_t rank = steps;
  double pivot0 = 0.0;
  for (std::size_t j = 0; j < steps; ++j) {
    std::size_t best = j;
    double best_sq = -1.0;
    for (std::size_t l = j; l < c; ++l) {
      double sq = 0.0;
      for (std::size_t i = j; i < r; ++i) sq += R(i, l) * R(i, l);
      if (sq > best_sq) {
        best_sq = sq;
        best = l;
      }
    }
    const double pivot = std::sqrt(std::max(best_sq, 0.0));
    if (j == 0) pivot0 = pivot;
    if (pivot <= kRankTolerance * pivot0) {
      rank = j;
      break;
    }
    if (best != j) {
      for (std::size_t i = 0; i < r; ++i) std::swap(R(i, j), R(i, best));
      std::swap(perm[j], perm[best]);
    }
    Vector v(r - j);
    for (std::size_t i = j; i < r; ++i) v[i - j] = R(i, j);
    const auto refl = detail::make_reflector(v);
    for (std::size_t l = j + 1; l < c; ++l) {
      double w = 0.0;
      for (std::size_t i = j; i < r; ++i) w += v[i - j] * R(i, l);
      w *= 2.0 / refl.vtv;
      for (std::size_t i = j; i < r; ++i) R(i, l) -= w * v[i - j];
    }
    double wy = 0.0;
    for (std::size_t i = j; i < r; ++i) wy += v[i - j] * qty[i];
    wy *= 2.0 / refl.vtv;
    for (std::size_t i = j; i < r; ++i) qty[i] -= wy * v[i - j];
    R(j, j) = refl.alpha;
    for (std::size_t i = j + 1; i < r; ++i) R(i, j) = 0.0;
  }

  const bool deficient = rank < c;
  Vector x(c, 0.0);
  if (rank > 0 && !deficient) {
    Vector xp(c, 0.0);
    for (std::size_t ii = c; ii-- > 0;) {
      double acc = qty[ii];
      for (std::size_t l = ii + 1; l < c; ++l) acc -= R(ii, l) * xp[l];
      xp[ii] = acc / R(ii, ii);
    }
    for (std::size_t l = 0; l < c; ++l) x[perm[l]] = xp[l];
  } else if (rank > 0) {
    // Complete orthogonal step: QR of the trapezoid's transpose turns
    // [T1 T2] into [L 0] Z^T, and the minimum-norm solution drops out of
    // the triangular part.
    Matrix Tt(c, rank);
    for (std::size_t i = 0; i < c; ++i) {
      for (std::size_t j = 0; j < rank; ++j) Tt(i, j) = R(j, i);
    }
    std::vector<Vector> zs(rank);
    std::vector<double> zvtv(rank);
    for (std::size_t j = 0; j < rank; ++j) {
      Vector v(c - j);
      for (std::size_t i = j; i < c; ++i) v[i - j] = Tt(i, j);
      const auto refl = detail::make_reflector(v);
      for (std::size_t l = j + 1; l < rank; ++l) {
        double w = 0.0;
        for (std::size_t i = j; i < c; ++i) w += v[i - j] * Tt(i, l);
        w *= 2.0 / refl.vtv;
        for (std::size_t i = j; i < c; ++i) Tt(i, l) -= w * v[i - j];
      }
      Tt(j, j) = refl.alpha;
      for (std::size_t i = j + 1; i < c; ++i) Tt(i, j) = 0.0;
      zs[j] = std::move(v);
      zvtv[j] = refl.vtv;
    }
    // Forward substitution on the lower-triangular U^T, U = Tt[0:rank].
    Vector w(rank, 0.0);
    for (std::size_t i = 0; i < rank; ++i) {
      double acc = qty[i];
      for (std::size_t l = 0; l < i; ++l) acc -= Tt(l, i) * w[l];
      if (Tt(i, i) == 0.0) {
        throw numerical_error("least_squares: degenerate triangular factor");
      }
      w[i] = acc / Tt(i, i);
    }
    Vector z(c, 0.0);
    for (std::size_t i = 0; i < rank; ++i) z[i] = w[i];
    for (std::size_t j = rank; j-- > 0;) {
      double s = 0.0;
      for (std::size_t i = j; i < c; ++i) s += zs[j][i - j] * z[i];
      s *= 2.0 / zvtv[j];
      for (std::size_t i = j; i < c; ++i) z[i] -= s * zs[j][i - j];
    }
    for (std::size_t l = 0; l < c; ++l) x[perm[l]] = z[l];
  }

  const Vector ax = matvec(a, x);
  double res = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    const double d = y[i] - ax[i];
    res += d * d;
  }
  return {std::move(x), std::sqrt(res), deficient};
}

}  // namespace rpkit
