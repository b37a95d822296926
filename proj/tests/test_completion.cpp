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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "rpkit/completion.hpp"
#include "rpkit/rng.hpp"
#include "support/oracles.hpp"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;
using rpkit::Matrix;
using rpkit::RngStream;
using rpkit::Vector;
namespace cp = rpkit::completion;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "rpkit-tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

Matrix matrix_sum(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
  }
  return out;
}

// The planted rank-1 instance shared by the feasibility cases: a 10x8 outer
// product with 51 of 80 entries revealed.
struct PlantedRank1 {
  Matrix x0;
  cp::ObservedMatrix observed;
  std::vector<std::pair<std::size_t, std::size_t>> hidden;
};

PlantedRank1 planted_rank1() {
  RngStream g(641, 1);
  Vector x(10);
  Vector y(8);
  for (double& v : x) v = g.next_gaussian();
  for (double& v : y) v = g.next_gaussian();
  PlantedRank1 out;
  out.x0 = Matrix(10, 8);
  for (std::size_t i = 0; i < 10; ++i) {
    for (std::size_t j = 0; j < 8; ++j) out.x0(i, j) = x[i] * y[j];
  }
  RngStream mask(641, 2);
  out.observed.n1 = 10;
  out.observed.n2 = 8;
  for (std::size_t i = 0; i < 10; ++i) {
    for (std::size_t j = 0; j < 8; ++j) {
      if (mask.next_u64() % 100 < 60) {
        out.observed.entries.push_back({i, j, out.x0(i, j)});
      } else {
        out.hidden.push_back({i, j});
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("nuclear norm sums the singular values", "[completion]") {
  CHECK(cp::nuclear_norm(Matrix::identity(5)) == 5.0);

  Matrix diag(2, 2);
  diag(0, 0) = 3.0;
  diag(1, 1) = 4.0;
  CHECK(cp::nuclear_norm(diag) == 7.0);

  CHECK(cp::nuclear_norm(Matrix(4, 3)) == 0.0);

  Matrix tiny(3, 3);
  tiny(1, 2) = 1e-8;
  CHECK(cp::nuclear_norm(tiny) > 0.0);

  SECTION("rank-2 product against a second factorization") {
    const Matrix b = oracles::gaussian_matrix(10, 2, 601);
    const Matrix c = oracles::gaussian_matrix(2, 8, 602);
    const Matrix x = rpkit::matmul(b, c);
    const std::vector<double> sv = oracles::singular_values_reference(x);
    long double sum = 0.0L;
    for (const double s : sv) sum += s;
    CHECK(std::abs(cp::nuclear_norm(x) - static_cast<double>(sum)) <= 1e-8);
  }
}

TEST_CASE("nuclear norm obeys the triangle inequality", "[completion]") {
  for (std::uint64_t seed = 611; seed < 621; ++seed) {
    const Matrix a = oracles::gaussian_matrix(7, 6, seed, 1);
    const Matrix b = oracles::gaussian_matrix(7, 6, seed, 2);
    CHECK(cp::nuclear_norm(matrix_sum(a, b)) <=
          cp::nuclear_norm(a) + cp::nuclear_norm(b) + 1e-9);
  }
}

TEST_CASE("nuclear norm is unitarily invariant", "[completion]") {
  for (std::uint64_t seed = 621; seed < 626; ++seed) {
    const Matrix x = oracles::gaussian_matrix(7, 5, seed);
    const Matrix q = oracles::random_orthogonal(7, seed + 50);
    CHECK(std::abs(cp::nuclear_norm(rpkit::matmul(q, x)) -
                   cp::nuclear_norm(x)) <= 1e-8);
  }
}

TEST_CASE("coherence separates spiky from flat subspaces", "[completion]") {
  Matrix spike(8, 1);
  spike(0, 0) = 1.0;
  CHECK(cp::coherence(spike) == 8.0);

  Matrix flat(8, 1);
  for (std::size_t i = 0; i < 8; ++i) flat(i, 0) = 1.0 / std::sqrt(8.0);
  CHECK(std::abs(cp::coherence(flat) - 1.0) <= 1e-12);

  CHECK(std::abs(cp::coherence(oracles::random_orthogonal(6, 631)) - 1.0) <=
        1e-12);

  Matrix axis(10, 3);
  axis(2, 0) = 1.0;
  axis(5, 1) = 1.0;
  axis(7, 2) = 1.0;
  CHECK(cp::coherence(axis) == 10.0 / 3.0);
}

TEST_CASE("coherence is a property of the span", "[completion]") {
  const Matrix big = oracles::random_orthogonal(8, 632);
  Matrix u(8, 3);
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = 0; j < 3; ++j) u(i, j) = big(i, j);
  }
  const double mu = cp::coherence(u);
  CHECK(mu >= 1.0 - 1e-12);
  CHECK(mu <= 8.0 / 3.0 + 1e-12);

  const Matrix q = oracles::random_orthogonal(3, 633);
  CHECK(std::abs(cp::coherence(rpkit::matmul(u, q)) - mu) <= 1e-9);
}

TEST_CASE("coherence rejects non-orthonormal bases", "[completion]") {
  CHECK_THROWS_MATCHES(cp::coherence(oracles::gaussian_matrix(6, 2, 634)),
                       std::invalid_argument,
                       MessageMatches(ContainsSubstring("orthonormal")));
  CHECK_THROWS_MATCHES(cp::coherence(Matrix(3, 5)), std::invalid_argument,
                       MessageMatches(ContainsSubstring("more columns")));
  Matrix scaled(4, 1);
  scaled(0, 0) = 2.0;
  CHECK_THROWS_AS(cp::coherence(scaled), std::invalid_argument);
}

TEST_CASE("the sample bound evaluates the incoherence formula",
          "[completion]") {
  CHECK(cp::sample_count_bound({1.0, 1, 100}, 3.0, 1.0) == 4369);
  CHECK(cp::sample_count_bound({1.0, 1, 100}, 3.0, 2.0) == 8738);

  SECTION("doubling the constant doubles the bound up to the ceiling") {
    const cp::CoherenceParams grid[] = {
        {0.7, 1, 10}, {1.0, 2, 30}, {2.5, 3, 64}, {1.3, 4, 200}};
    for (const cp::CoherenceParams& p : grid) {
      const std::size_t m1 = cp::sample_count_bound(p, 2.5, 0.9);
      const std::size_t m2 = cp::sample_count_bound(p, 2.5, 1.8);
      CHECK(m2 >= 2 * m1 - 1);
      CHECK(m2 <= 2 * m1);
    }
  }
  SECTION("monotone in incoherence, rank, and dimension") {
    std::size_t prev = 0;
    for (const double mu0 : {0.5, 1.0, 1.5, 2.0, 3.0}) {
      const std::size_t m = cp::sample_count_bound({mu0, 2, 50}, 2.5, 1.3);
      CHECK(m >= prev);
      prev = m;
    }
    prev = 0;
    for (const std::size_t r : {1u, 2u, 3u, 4u}) {
      const std::size_t m = cp::sample_count_bound({1.2, r, 50}, 2.5, 1.3);
      CHECK(m >= prev);
      prev = m;
    }
    prev = 0;
    for (const std::size_t n : {10u, 20u, 40u, 80u}) {
      const std::size_t m = cp::sample_count_bound({1.2, 2, n}, 2.5, 1.3);
      CHECK(m >= prev);
      prev = m;
    }
  }
  SECTION("never below the dimension-incoherence floor") {
    for (const double mu0 : {0.5, 1.0, 2.0}) {
      for (const std::size_t n : {5u, 50u, 500u}) {
        const std::size_t m = cp::sample_count_bound({mu0, 3, n}, 2.2, 0.8);
        const double floor = 0.8 * mu0 * static_cast<double>(n) * 3.0 * 2.2 *
                             std::log(static_cast<double>(n));
        CHECK(static_cast<double>(m) >= floor - 1e-6);
      }
    }
  }
}

TEST_CASE("the sample bound enforces its constants", "[completion]") {
  CHECK_THROWS_MATCHES(cp::sample_count_bound({1.0, 1, 100}, 2.0, 1.0),
                       std::invalid_argument,
                       MessageMatches(ContainsSubstring("beta") &&
                                      ContainsSubstring("2")));
  CHECK_THROWS_AS(cp::sample_count_bound({1.0, 1, 100}, 1.5, 1.0),
                  std::invalid_argument);
  CHECK(cp::sample_count_bound({1.0, 1, 100}, 2.0001, 1.0) >= 1);

  CHECK_THROWS_AS(cp::sample_count_bound({1.0, 1, 1}, 3.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(cp::sample_count_bound({1.0, 0, 100}, 3.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(cp::sample_count_bound({0.0, 1, 100}, 3.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(cp::sample_count_bound({-1.0, 1, 100}, 3.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(cp::sample_count_bound({1.0, 1, 100}, 3.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(cp::sample_count_bound({1.0, 1, 100}, 3.0, -2.0),
                  std::invalid_argument);
}

TEST_CASE("feasibility is the observed-entry constraint", "[completion]") {
  const Matrix y = oracles::gaussian_matrix(4, 3, 604);
  cp::ObservedMatrix all;
  all.n1 = 4;
  all.n2 = 3;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 3; ++j) all.entries.push_back({i, j, y(i, j)});
  }

  const cp::CompletionReport base = cp::check_completion(y, all, 1e-9);
  CHECK(base.feasible);

  Matrix off = y;
  off(2, 1) += 1.0;
  CHECK_FALSE(cp::check_completion(off, all, 1e-9).feasible);

  SECTION("the tolerance is inclusive") {
    Matrix near = y;
    near(0, 0) += 0.5;
    CHECK(cp::check_completion(near, all, 0.5).feasible);
    CHECK_FALSE(cp::check_completion(near, all, 0.49).feasible);
  }
  SECTION("rank and norm come from the spectrum") {
    const std::vector<double> sv = oracles::singular_values_reference(y);
    long double sum = 0.0L;
    for (const double s : sv) sum += s;
    CHECK(std::abs(base.nuclear_norm - static_cast<double>(sum)) <= 1e-8);
    CHECK(base.rank == 3);
  }
}

TEST_CASE("completion reports cover degenerate candidates", "[completion]") {
  cp::ObservedMatrix one;
  one.n1 = 3;
  one.n2 = 3;
  one.entries.push_back({0, 0, 0.0});
  const cp::CompletionReport zero = cp::check_completion(Matrix(3, 3), one,
                                                         0.0);
  CHECK(zero.feasible);
  CHECK(zero.rank == 0);
  CHECK(zero.nuclear_norm == 0.0);

  cp::ObservedMatrix empty;
  empty.n1 = 2;
  empty.n2 = 2;
  Matrix diag(2, 2);
  diag(0, 0) = 3.0;
  diag(1, 1) = 4.0;
  const cp::CompletionReport d = cp::check_completion(diag, empty, 1e-9);
  CHECK(d.feasible);
  CHECK(d.rank == 2);
  CHECK(d.nuclear_norm == 7.0);

  CHECK_THROWS_MATCHES(
      cp::check_completion(Matrix(3, 4), one, 1e-9), std::invalid_argument,
      MessageMatches(ContainsSubstring("3x4") && ContainsSubstring("3x3")));
  CHECK_THROWS_AS(cp::check_completion(Matrix(3, 3), one, -1.0),
                  std::invalid_argument);

  cp::ObservedMatrix dup = one;
  dup.entries.push_back({0, 0, 1.0});
  CHECK_THROWS_MATCHES(cp::check_completion(Matrix(3, 3), dup, 0.0),
                       std::invalid_argument,
                       MessageMatches(ContainsSubstring("duplicate")));
  cp::ObservedMatrix outside = one;
  outside.entries.push_back({3, 0, 1.0});
  CHECK_THROWS_AS(cp::check_completion(Matrix(3, 3), outside, 0.0),
                  std::invalid_argument);
}

TEST_CASE("a planted low-rank completion beats its perturbations",
          "[completion]") {
  const PlantedRank1 inst = planted_rank1();
  REQUIRE(inst.observed.entries.size() == 51);
  REQUIRE(inst.hidden.size() == 29);

  const cp::CompletionReport base =
      cp::check_completion(inst.x0, inst.observed, 1e-9);
  CHECK(base.feasible);
  CHECK(base.rank == 1);

  RngStream pg(641, 3);
  const double scales[3] = {0.01, 0.1, 1.0};
  for (int t = 0; t < 60; ++t) {
    Matrix pert = inst.x0;
    for (const auto& [i, j] : inst.hidden) {
      pert(i, j) += scales[t % 3] * pg.next_gaussian();
    }
    const cp::CompletionReport rep =
        cp::check_completion(pert, inst.observed, 1e-9);
    REQUIRE(rep.feasible);
    REQUIRE(rep.nuclear_norm > base.nuclear_norm + 0.01);
  }
}

TEST_CASE("observed matrices round trip through files", "[completion]") {
  const fs::path dir = fresh_dir("completion");
  cp::ObservedMatrix obs;
  obs.n1 = 3;
  obs.n2 = 4;
  obs.entries = {{0, 1, 2.5}, {2, 3, -1.0 / 3.0}, {1, 0, 1e-17}};
  const std::string path = (dir / "obs.csv").string();
  cp::write_observed_csv(path, obs);

  const cp::ObservedMatrix back = cp::read_observed_csv(path);
  CHECK(back == obs);

  const std::string again = (dir / "obs2.csv").string();
  cp::write_observed_csv(again, back);
  CHECK(rpkit::io::detail::read_file_bytes(path) ==
        rpkit::io::detail::read_file_bytes(again));

  SECTION("header-only files carry an empty mask") {
    const std::string p = (dir / "empty.csv").string();
    write_text(p, "# 5 6\n");
    const cp::ObservedMatrix e = cp::read_observed_csv(p);
    CHECK(e.n1 == 5);
    CHECK(e.n2 == 6);
    CHECK(e.entries.empty());
  }
  SECTION("malformed headers") {
    const std::string p = (dir / "bad.csv").string();
    write_text(p, "0,0,1.0\n");
    CHECK_THROWS_MATCHES(cp::read_observed_csv(p), rpkit::io_error,
                         MessageMatches(ContainsSubstring("# n1 n2")));
    write_text(p, "# 3\n");
    CHECK_THROWS_AS(cp::read_observed_csv(p), rpkit::io_error);
    write_text(p, "# 0 4\n");
    CHECK_THROWS_AS(cp::read_observed_csv(p), rpkit::io_error);
    write_text(p, "");
    CHECK_THROWS_MATCHES(cp::read_observed_csv(p), rpkit::io_error,
                         MessageMatches(ContainsSubstring("empty")));
  }
  SECTION("malformed entries name their line") {
    const std::string p = (dir / "bad2.csv").string();
    write_text(p, "# 3 4\n0,1,2.5\n2,9,1.0\n");
    CHECK_THROWS_MATCHES(cp::read_observed_csv(p), rpkit::io_error,
                         MessageMatches(ContainsSubstring(":3:") &&
                                        ContainsSubstring("column index 9")));
    write_text(p, "# 3 4\n0,1\n");
    CHECK_THROWS_MATCHES(cp::read_observed_csv(p), rpkit::io_error,
                         MessageMatches(ContainsSubstring("i,j,value")));
    write_text(p, "# 3 4\n0,1,2.5,7\n");
    CHECK_THROWS_AS(cp::read_observed_csv(p), rpkit::io_error);
    write_text(p, "# 3 4\nx,1,2.5\n");
    CHECK_THROWS_MATCHES(cp::read_observed_csv(p), rpkit::io_error,
                         MessageMatches(ContainsSubstring("row index")));
    write_text(p, "# 3 4\n0,1,nope\n");
    CHECK_THROWS_AS(cp::read_observed_csv(p), rpkit::io_error);
    write_text(p, "# 3 4\n0,1,2.5\n0,1,3.5\n");
    CHECK_THROWS_MATCHES(cp::read_observed_csv(p), rpkit::io_error,
                         MessageMatches(ContainsSubstring("duplicate")));
  }
  SECTION("writers refuse invalid masks") {
    cp::ObservedMatrix bad = obs;
    bad.entries.push_back({9, 0, 1.0});
    CHECK_THROWS_AS(cp::write_observed_csv((dir / "x.csv").string(), bad),
                    std::invalid_argument);
  }
}
