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
#include <charconv>
#include <cmath>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rpkit/error.hpp"
#include "rpkit/io.hpp"
#include "rpkit/linalg.hpp"
#include "rpkit/matrix.hpp"

// The formula layer of nuclear-norm matrix completion: the norm itself,
// subspace coherence, the observed-entry lower bound, and feasibility
// checking of candidate completions. There is deliberately no solver here;
// the pieces below make the minimization problem testable without one.

namespace rpkit::completion {

struct ObservedEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  double value = 0.0;

  friend bool operator==(const ObservedEntry&, const ObservedEntry&) = default;
};

// A partially observed matrix: a shape plus the revealed entries. Entry
// order is preserved (files round-trip byte for byte); locations must be
// distinct, in range, and carry finite values.
struct ObservedMatrix {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::vector<ObservedEntry> entries;

  friend bool operator==(const ObservedMatrix&, const ObservedMatrix&) =
      default;
};

inline void validate(const ObservedMatrix& y, const std::string& who) {
  if (y.n1 == 0 || y.n2 == 0) {
    throw std::invalid_argument(who + ": observed shape has a zero dimension");
  }
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const ObservedEntry& e : y.entries) {
    if (e.i >= y.n1 || e.j >= y.n2) {
      throw std::invalid_argument(
          who + ": observed location (" + std::to_string(e.i) + ", " +
          std::to_string(e.j) + ") is outside the " + std::to_string(y.n1) +
          "x" + std::to_string(y.n2) + " shape");
    }
    if (!std::isfinite(e.value)) {
      throw std::invalid_argument(who + ": observed value at (" +
                                  std::to_string(e.i) + ", " +
                                  std::to_string(e.j) + ") is not finite");
    }
    if (!seen.insert({e.i, e.j}).second) {
      throw std::invalid_argument(who + ": duplicate observed location (" +
                                  std::to_string(e.i) + ", " +
                                  std::to_string(e.j) + ")");
    }
  }
}

// Sum of the singular values. Zero exactly when the matrix is zero.
inline double nuclear_norm(const Matrix& x) {
  const Vector sv = singular_values(x);
  double sum = 0.0;
  for (const double s : sv) sum += s;
  return sum;
}

// Orthonormality slack accepted by coherence(). Matches the least-squares
// rank tolerance scale rather than machine epsilon: callers often hand in
// bases assembled from iterative factorizations.
inline constexpr double kOrthoTol = 1e-8;

// mu(U) = (n/r) * max_i |row i of U|^2 for an n x r orthonormal basis: how
// far the spanned subspace concentrates on a single coordinate. 1 for
// perfectly spread subspaces, n/r for ones aligned with basis vectors.
inline double coherence(const Matrix& basis) {
  const std::size_t n = basis.rows();
  const std::size_t r = basis.cols();
  if (r > n) {
    throw std::invalid_argument(
        "coherence: a basis with more columns than rows cannot have "
        "orthonormal columns");
  }
  for (std::size_t p = 0; p < r; ++p) {
    for (std::size_t q = p; q < r; ++q) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += basis(i, p) * basis(i, q);
      const double want = (p == q) ? 1.0 : 0.0;
      if (std::abs(dot - want) > kOrthoTol) {
        throw std::invalid_argument(
            "coherence: basis columns are not orthonormal (columns " +
            std::to_string(p) + " and " + std::to_string(q) + " deviate by " +
            std::to_string(std::abs(dot - want)) + ")");
      }
    }
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < r; ++j) row += basis(i, j) * basis(i, j);
    worst = std::max(worst, row);
  }
  return (static_cast<double>(n) / static_cast<double>(r)) * worst;
}

// Incoherence parameters of the completion bound. mu1 is pinned to
// mu0 * sqrt(r), so it is exposed as an accessor instead of a second field
// that could drift out of agreement.
struct CoherenceParams {
  double mu0 = 1.0;
  std::size_t r = 1;
  std::size_t n = 2;

  double mu1() const { return mu0 * std::sqrt(static_cast<double>(r)); }
};

// Smallest observed-entry count that makes the relaxed problem solvable with
// high probability:
//
//   m = ceil(C * max(mu1^2, mu0^(1/2) mu1, mu0 n^(1/4)) * n * r * beta * ln n)
//
// Only beta > 2 carries a recovery guarantee, so smaller values are rejected.
inline std::size_t sample_count_bound(const CoherenceParams& params,
                                      double beta, double c) {
  if (params.n < 2) {
    throw std::invalid_argument("sample_count_bound: requires n >= 2, got " +
                                std::to_string(params.n));
  }
  if (params.r < 1) {
    throw std::invalid_argument("sample_count_bound: requires r >= 1");
  }
  if (!(params.mu0 > 0.0) || !std::isfinite(params.mu0)) {
    throw std::invalid_argument(
        "sample_count_bound: mu0 must be positive and finite");
  }
  if (!(beta > 2.0) || !std::isfinite(beta)) {
    throw std::invalid_argument(
        "sample_count_bound: beta must exceed 2 (recovery holds with high "
        "probability only for beta > 2), got " + std::to_string(beta));
  }
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument(
        "sample_count_bound: the constant must be positive and finite");
  }
  const double n = static_cast<double>(params.n);
  const double r = static_cast<double>(params.r);
  const double mu0 = params.mu0;
  const double mu1 = params.mu1();
  const double lead =
      std::max({mu1 * mu1, std::sqrt(mu0) * mu1, mu0 * std::pow(n, 0.25)});
  const double m = std::ceil(c * lead * n * r * beta * std::log(n));
  if (!(m < 9.007199254740992e15)) {
    throw numerical_error("sample_count_bound: bound exceeds the count range");
  }
  return static_cast<std::size_t>(m);
}

// Relative cutoff under the top singular value for the numerical rank
// reported by check_completion.
inline constexpr double kRankRelTol = 1e-9;

struct CompletionReport {
  // Every observed entry matched the candidate within the given tolerance.
  bool feasible = false;
  std::size_t rank = 0;
  double nuclear_norm = 0.0;
};

// Scores a proposed completion against the observations. Feasibility is the
// hard constraint of the minimization problem; rank and nuclear norm are the
// two objectives candidates compete on.
inline CompletionReport check_completion(const Matrix& candidate,
                                         const ObservedMatrix& observed,
                                         double tol) {
  validate(observed, "check_completion");
  if (candidate.rows() != observed.n1 || candidate.cols() != observed.n2) {
    throw std::invalid_argument(
        "check_completion: candidate is " +
        rpkit::detail::shape_str(candidate.rows(), candidate.cols()) +
        " but the observations describe " + std::to_string(observed.n1) + "x" +
        std::to_string(observed.n2));
  }
  if (!(tol >= 0.0) || !std::isfinite(tol)) {
    throw std::invalid_argument(
        "check_completion: tol must be finite and non-negative");
  }
  CompletionReport report;
  report.feasible = true;
  for (const ObservedEntry& e : observed.entries) {
    if (std::abs(candidate(e.i, e.j) - e.value) > tol) {
      report.feasible = false;
      break;
    }
  }
  const Vector sv = singular_values(candidate);
  const double cutoff = kRankRelTol * sv.front();
  for (const double s : sv) {
    report.nuclear_norm += s;
    if (s > cutoff) ++report.rank;
  }
  return report;
}

// Observed matrices travel as CSV: a "# n1 n2" shape header, then one
// "i,j,value" line per revealed entry. Entry order is preserved.

namespace detail {

inline std::size_t parse_index(const std::string& path, std::size_t line,
                               std::string_view field, std::size_t bound,
                               const char* axis) {
  std::size_t b = 0;
  std::size_t e = field.size();
  while (b < e && (field[b] == ' ' || field[b] == '\t')) ++b;
  while (e > b && (field[e - 1] == ' ' || field[e - 1] == '\t')) --e;
  const std::string_view body = field.substr(b, e - b);
  std::size_t v = 0;
  const auto res = std::from_chars(body.data(), body.data() + body.size(), v);
  if (body.empty() || res.ec != std::errc() ||
      res.ptr != body.data() + body.size()) {
    throw io_error(path + ":" + std::to_string(line) + ": cannot parse '" +
                   std::string(body) + "' as a " + axis + " index");
  }
  if (v >= bound) {
    throw io_error(path + ":" + std::to_string(line) + ": " + axis +
                   " index " + std::to_string(v) +
                   " is outside the declared shape");
  }
  return v;
}

}  // namespace detail

inline ObservedMatrix read_observed_csv(const std::string& path) {
  const std::string bytes = io::detail::read_file_bytes(path);
  if (bytes.empty()) throw io_error(path + ": file is empty");
  ObservedMatrix out;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= bytes.size()) {
    std::size_t eol = bytes.find('\n', pos);
    const bool last = (eol == std::string::npos);
    std::string_view line(bytes.data() + pos, (last ? bytes.size() : eol) - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (last && line.empty()) break;
    if (line_no == 1) {
      std::size_t n1 = 0;
      std::size_t n2 = 0;
      const char* p = line.data();
      const char* end = line.data() + line.size();
      bool ok = p != end && *p == '#';
      if (ok) ++p;
      while (p != end && *p == ' ') ++p;
      auto r1 = std::from_chars(p, end, n1);
      ok = ok && r1.ec == std::errc() && r1.ptr != end && *r1.ptr == ' ';
      if (ok) {
        p = r1.ptr;
        while (p != end && *p == ' ') ++p;
        auto r2 = std::from_chars(p, end, n2);
        ok = r2.ec == std::errc() && r2.ptr == end;
      }
      if (!ok || n1 == 0 || n2 == 0) {
        throw io_error(path + ":1: expected a '# n1 n2' shape header");
      }
      out.n1 = n1;
      out.n2 = n2;
    } else {
      const std::size_t c1 = line.find(',');
      const std::size_t c2 =
          (c1 == std::string_view::npos) ? c1 : line.find(',', c1 + 1);
      if (c2 == std::string_view::npos ||
          line.find(',', c2 + 1) != std::string_view::npos) {
        throw io_error(path + ":" + std::to_string(line_no) +
                       ": expected 'i,j,value'");
      }
      ObservedEntry e;
      e.i = detail::parse_index(path, line_no, line.substr(0, c1), out.n1,
                                "row");
      e.j = detail::parse_index(path, line_no,
                                line.substr(c1 + 1, c2 - c1 - 1), out.n2,
                                "column");
      e.value = io::detail::parse_double_field(path, line_no,
                                               line.substr(c2 + 1));
      if (!seen.insert({e.i, e.j}).second) {
        throw io_error(path + ":" + std::to_string(line_no) +
                       ": duplicate location (" + std::to_string(e.i) + ", " +
                       std::to_string(e.j) + ")");
      }
      out.entries.push_back(e);
    }
    if (last) break;
    pos = eol + 1;
  }
  if (out.n1 == 0) throw io_error(path + ": missing '# n1 n2' shape header");
  return out;
}

inline void write_observed_csv(const std::string& path,
                               const ObservedMatrix& y) {
  validate(y, "write_observed_csv");
  std::string out = "# " + std::to_string(y.n1) + " " + std::to_string(y.n2) +
                    "\n";
  for (const ObservedEntry& e : y.entries) {
    out += std::to_string(e.i) + "," + std::to_string(e.j) + "," +
           io::detail::format_double(e.value) + "\n";
  }
  io::detail::write_file_bytes(path, out);
}

}  // namespace rpkit::completion
