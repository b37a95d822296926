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

// Plants a sparse signal, measures it with less than half the samples its
// length would suggest, and recovers it exactly. Also reports how close to
// an isometry the sensing matrix is on sparse inputs. Run with no
// arguments.

#include <cmath>
#include <cstdio>

#include "rpkit/matrix.hpp"
#include "rpkit/rng.hpp"
#include "rpkit/sensing.hpp"

using rpkit::Matrix;
using rpkit::RngStream;
using rpkit::Vector;
namespace sn = rpkit::sensing;

int main() {
  const std::size_t n = 48, m = 24, S = 3;

  RngStream g(11, 0);
  Matrix a(m, n);
  const double root_m = std::sqrt(static_cast<double>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(i, j) = g.next_gaussian() / root_m;
  }

  const sn::SparseSignal planted{n, {5, 19, 40}, Vector{1.25, -0.6, 2.0}};
  const Vector y = rpkit::matvec(a, sn::to_dense(planted));

  std::printf("signal length %zu, sparsity %zu, measurements %zu\n", n, S, m);
  std::printf("planted:   ");
  for (std::size_t i = 0; i < S; ++i) {
    std::printf("x[%zu] = %g  ", planted.support[i], planted.values[i]);
  }
  std::printf("\n");

  const sn::RecoveryResult rec = sn::recover_sparse(a, y, S);
  std::printf("recovered: ");
  for (std::size_t i = 0; i < rec.signal.support.size(); ++i) {
    std::printf("x[%zu] = %g  ", rec.signal.support[i],
                rec.signal.values[i]);
  }
  std::printf("\nresidual %.3g, %s\n\n", rec.residual,
              rec.unique ? "no competing support fits"
                         : "another support fits as well");

  const sn::RipReport rip = sn::rip_constant(a, 2);
  std::printf(
      "isometry constant of the sensing matrix on 2-sparse inputs:\n"
      "  delta = %.4f over %llu supports, worst at {%zu, %zu}\n",
      rip.delta, static_cast<unsigned long long>(rip.supports_checked),
      rip.worst_support[0], rip.worst_support[1]);

  std::printf(
      "\nthe logarithmic rule of thumb asks for %zu measurements at this\n"
      "length and sparsity; %zu were enough here.\n",
      sn::measurement_bound(S, n, 4.0), m);
  return 0;
}
