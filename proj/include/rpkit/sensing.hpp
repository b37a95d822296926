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
#include <string>
#include <utility>
#include <vector>

#include "rpkit/error.hpp"
#include "rpkit/linalg.hpp"
#include "rpkit/matrix.hpp"
#include "rpkit/parallel.hpp"

// Desk-scale compressed sensing: exact sensing y = Phi f, RIP constants
// certified by exhaustive support enumeration, and sparse recovery by
// trying every candidate support. The isometry constant uses unsquared
// norms, (1 - delta)|x| <= |Ax| <= (1 + delta)|x|; much of the literature
// squares them, so deltas here are not directly comparable to those.

namespace rpkit::sensing {

// Hard ceiling on enumerated supports; this module certifies toy systems,
// it does not pretend to scale.
inline constexpr std::uint64_t kSupportBudget = 1000000;

struct SparseSignal {
  std::size_t n = 0;
  // Sorted, distinct, in [0, n); values aligned with it and nonzero.
  std::vector<std::size_t> support;
  Vector values;
};

inline void validate(const SparseSignal& s, const std::string& who) {
  if (s.support.size() != s.values.size()) {
    throw std::invalid_argument(who + ": support and values lengths differ");
  }
  if (s.support.size() > s.n) {
    throw std::invalid_argument(who + ": more support entries than dimensions");
  }
  for (std::size_t i = 0; i < s.support.size(); ++i) {
    if (s.support[i] >= s.n) {
      throw std::invalid_argument(who + ": support index " +
                                  std::to_string(s.support[i]) +
                                  " outside dimension " + std::to_string(s.n));
    }
    if (i > 0 && s.support[i] <= s.support[i - 1]) {
      throw std::invalid_argument(who + ": support must be strictly increasing");
    }
    if (s.values[i] == 0.0 || !std::isfinite(s.values[i])) {
      throw std::invalid_argument(who + ": values must be finite and nonzero");
    }
  }
}

inline Vector to_dense(const SparseSignal& s) {
  validate(s, "to_dense");
  Vector out(s.n, 0.0);
  for (std::size_t i = 0; i < s.support.size(); ++i) {
    out[s.support[i]] = s.values[i];
  }
  return out;
}

class SensingSystem {
 public:
  explicit SensingSystem(Matrix phi)
      : phi_(std::move(phi)),
        psi_(Matrix::identity(phi_.cols())),
        a_(phi_) {}

  SensingSystem(Matrix phi, Matrix psi)
      : phi_(std::move(phi)), psi_(std::move(psi)), a_() {
    if (psi_.rows() != phi_.cols() || psi_.cols() != phi_.cols()) {
      throw std::invalid_argument(
          "SensingSystem: basis must be " +
          rpkit::detail::shape_str(phi_.cols(), phi_.cols()) + ", got " +
          rpkit::detail::shape_str(psi_.rows(), psi_.cols()));
    }
    if (least_squares(psi_, Vector(psi_.rows(), 0.0)).rank_deficient) {
      throw std::invalid_argument("SensingSystem: basis is singular");
    }
    a_ = matmul(phi_, psi_);
  }

  const Matrix& phi() const { return phi_; }
  const Matrix& psi() const { return psi_; }
  const Matrix& a() const { return a_; }

 private:
  Matrix phi_;
  Matrix psi_;
  Matrix a_;
};

inline Vector sense(const Vector& f, const SensingSystem& system) {
  if (f.size() != system.phi().cols()) {
    throw std::invalid_argument(
        "sense: signal has length " + std::to_string(f.size()) +
        " but the system measures " + std::to_string(system.phi().cols()));
  }
  return matvec(system.phi(), f);
}

namespace detail {

// C(n, s), clamped: the flag reports a value too large for 64 bits.
inline std::uint64_t binomial_clamped(std::size_t n, std::size_t s,
                                      bool& clamped) {
  clamped = false;
  if (s > n) return 0;
  s = std::min(s, n - s);
  unsigned __int128 c = 1;
  for (std::size_t i = 1; i <= s; ++i) {
    c = c * (n - s + i) / i;
    if (c > static_cast<unsigned __int128>(UINT64_MAX)) {
      clamped = true;
      return UINT64_MAX;
    }
  }
  return static_cast<std::uint64_t>(c);
}

inline std::uint64_t support_count_checked(std::size_t n, std::size_t s,
                                           const std::string& who) {
  bool clamped = false;
  const std::uint64_t count = binomial_clamped(n, s, clamped);
  if (clamped || count > kSupportBudget) {
    throw std::invalid_argument(
        who + ": " + (clamped ? "more than " : "") + std::to_string(count) +
        " supports of size " + std::to_string(s) + " over " +
        std::to_string(n) + " columns exceed the " +
        std::to_string(kSupportBudget) + " budget");
  }
  return count;
}

// Lexicographic support of the given rank, by the combinatorial number
// system. All counts involved are below the enumeration budget.
inline std::vector<std::size_t> support_at_rank(std::size_t n, std::size_t s,
                                                std::uint64_t rank) {
  std::vector<std::size_t> out(s);
  std::size_t next = 0;
  bool clamped = false;
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t v = next;; ++v) {
      const std::uint64_t below =
          binomial_clamped(n - 1 - v, s - i - 1, clamped);
      if (rank < below) {
        out[i] = v;
        next = v + 1;
        break;
      }
      rank -= below;
    }
  }
  return out;
}

inline bool next_support(std::vector<std::size_t>& sup, std::size_t n) {
  const std::size_t s = sup.size();
  for (std::size_t i = s; i-- > 0;) {
    if (sup[i] < n - s + i) {
      ++sup[i];
      for (std::size_t j = i + 1; j < s; ++j) sup[j] = sup[j - 1] + 1;
      return true;
    }
  }
  return false;
}

inline Matrix sub_columns(const Matrix& a,
                          const std::vector<std::size_t>& cols) {
  Matrix out(a.rows(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (std::size_t i = 0; i < a.rows(); ++i) out(i, j) = a(i, cols[j]);
  }
  return out;
}

inline double support_delta(const Matrix& a,
                            const std::vector<std::size_t>& sup) {
  const Matrix sub = sub_columns(a, sup);
  const std::vector<double> sv = singular_values(sub);
  const double smax = sv.front();
  // A submatrix with more columns than rows has a nontrivial null space,
  // so its smallest singular value as an operator on the support is zero.
  const double smin = sup.size() > a.rows() ? 0.0 : sv.back();
  return std::max(smax - 1.0, 1.0 - smin);
}

}  // namespace detail

struct RipReport {
  std::size_t S = 0;
  double delta = 0.0;
  // Lexicographically first support attaining delta.
  std::vector<std::size_t> worst_support;
  std::uint64_t supports_checked = 0;
};

inline RipReport rip_constant(const Matrix& a, std::size_t S,
                              unsigned threads = 1) {
  const std::size_t n = a.cols();
  if (S == 0 || S > n) {
    throw std::invalid_argument("rip_constant: S must be in [1, " +
                                std::to_string(n) + "]");
  }
  const std::uint64_t total =
      detail::support_count_checked(n, S, "rip_constant");

  struct Best {
    double delta = -1.0;
    std::vector<std::size_t> support;
  };
  const unsigned workers =
      std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(
                                                   std::min<std::uint64_t>(
                                                       total, 64))));
  std::vector<Best> partial(workers);
  // Chunks scan disjoint rank ranges in lexicographic order; each keeps
  // its first maximum, and the chunk-ordered reduction below makes the
  // result identical for any thread count.
  parallel_for_chunks(
      static_cast<std::size_t>(workers), threads,
      [&](std::size_t wbegin, std::size_t wend) {
        for (std::size_t w = wbegin; w < wend; ++w) {
          const std::uint64_t lo = total * w / workers;
          const std::uint64_t hi = total * (w + 1) / workers;
          if (lo >= hi) continue;
          std::vector<std::size_t> sup = detail::support_at_rank(n, S, lo);
          Best local;
          for (std::uint64_t r = lo; r < hi; ++r) {
            const double d = detail::support_delta(a, sup);
            if (d > local.delta) {
              local.delta = d;
              local.support = sup;
            }
            if (r + 1 < hi) detail::next_support(sup, n);
          }
          partial[w] = std::move(local);
        }
      });
  Best best;
  for (const Best& p : partial) {
    if (p.delta > best.delta) best = p;
  }
  return {S, best.delta, std::move(best.support), total};
}

struct RecoveryResult {
  SparseSignal signal;
  double residual = 0.0;
  // False when another support fits the measurements essentially as well
  // (residual within 1e-8) with a materially different signal
  // (entries apart by more than 1e-6).
  bool unique = true;
};

inline RecoveryResult recover_sparse(const Matrix& a, const Vector& y,
                                     std::size_t S) {
  const std::size_t n = a.cols();
  if (y.size() != a.rows()) {
    throw std::invalid_argument(
        "recover_sparse: measurement length " + std::to_string(y.size()) +
        " does not match " + std::to_string(a.rows()) + " sensing rows");
  }
  if (S == 0 || S > n) {
    throw std::invalid_argument("recover_sparse: S must be in [1, " +
                                std::to_string(n) + "]");
  }
  const std::uint64_t total =
      detail::support_count_checked(n, S, "recover_sparse");

  std::vector<double> residuals(total);
  double best = std::numeric_limits<double>::infinity();
  std::uint64_t best_rank = 0;
  std::vector<std::size_t> sup(S);
  for (std::size_t i = 0; i < S; ++i) sup[i] = i;
  std::vector<std::size_t> best_sup = sup;
  for (std::uint64_t r = 0; r < total; ++r) {
    const LeastSquaresResult ls =
        least_squares(detail::sub_columns(a, sup), y);
    residuals[r] = ls.residual_norm;
    if (ls.residual_norm < best) {
      best = ls.residual_norm;
      best_rank = r;
      best_sup = sup;
    }
    if (r + 1 < total) detail::next_support(sup, n);
  }

  const Vector best_x = least_squares(detail::sub_columns(a, best_sup), y).solution;
  auto dense_of = [n](const std::vector<std::size_t>& s, const Vector& v) {
    Vector d(n, 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) d[s[i]] = v[i];
    return d;
  };
  const Vector best_dense = dense_of(best_sup, best_x);

  // Second pass: only near-ties need their solutions materialized.
  bool unique = true;
  for (std::size_t i = 0; i < S; ++i) sup[i] = i;
  for (std::uint64_t r = 0; r < total && unique; ++r) {
    if (r != best_rank && residuals[r] <= best + 1e-8) {
      const Vector x =
          least_squares(detail::sub_columns(a, sup), y).solution;
      const Vector dense = dense_of(sup, x);
      double gap = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        gap = std::max(gap, std::abs(dense[i] - best_dense[i]));
      }
      unique = gap <= 1e-6;
    }
    if (r + 1 < total) detail::next_support(sup, n);
  }

  SparseSignal sig;
  sig.n = n;
  for (std::size_t i = 0; i < best_sup.size(); ++i) {
    // Exactly-zero coefficients are not part of the signal; the all-zero
    // measurement recovers the empty signal this way.
    if (best_x[i] != 0.0) {
      sig.support.push_back(best_sup[i]);
      sig.values.push_back(best_x[i]);
    }
  }
  return {std::move(sig), best, unique};
}

// m = ceil(constant * S * ln(n / S)), floored at S so the bound never
// asks for fewer measurements than unknowns on its own support.
inline std::size_t measurement_bound(std::size_t S, std::size_t n,
                                     double constant) {
  if (S == 0 || S > n) {
    throw std::invalid_argument("measurement_bound: need 1 <= S <= n");
  }
  if (!(constant > 0.0) || !std::isfinite(constant)) {
    throw std::invalid_argument(
        "measurement_bound: constant must be a positive real");
  }
  const double raw = constant * static_cast<double>(S) *
                     std::log(static_cast<double>(n) / static_cast<double>(S));
  const double m = std::ceil(raw);
  return std::max(S, static_cast<std::size_t>(m < 0.0 ? 0.0 : m));
}

// Consistency oracle for the pairwise RIP sandwich: with delta of order
// min(2 max(S1, S2), n) certified by enumeration, the difference of two
// sensed sparse signals must stay inside it. Boundary equality counts as
// holding, which the paper's orthonormal examples attain.
inline bool rip_pairwise_check(const Matrix& a, const SparseSignal& x1,
                               const SparseSignal& x2) {
  validate(x1, "rip_pairwise_check");
  validate(x2, "rip_pairwise_check");
  if (x1.n != a.cols() || x2.n != a.cols()) {
    throw std::invalid_argument(
        "rip_pairwise_check: signals must live in the sensing dimension " +
        std::to_string(a.cols()));
  }
  const std::size_t order = std::min(
      2 * std::max(x1.support.size(), x2.support.size()), a.cols());
  if (order == 0) return true;
  const RipReport rip = rip_constant(a, order);
  const Vector d1 = to_dense(x1);
  const Vector d2 = to_dense(x2);
  Vector diff(a.cols());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = d1[i] - d2[i];
  const double dx = norm(diff);
  const double dy = norm(matvec(a, diff));
  return (1.0 - rip.delta) * dx <= dy && dy <= (1.0 + rip.delta) * dx;
}

}  // namespace rpkit::sensing
