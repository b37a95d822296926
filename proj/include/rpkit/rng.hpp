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
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rpkit/matrix.hpp"

namespace rpkit {

namespace detail {

// SplitMix64 output stage. Bijective on 64-bit words.
inline constexpr std::uint64_t splitmix_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

}  // namespace detail

// Counter-based generator: the state is a 64-bit counter advanced by the
// golden-ratio increment, the output is the SplitMix64 finalizer of the
// counter. The starting counter mixes seed and stream_id through two
// independent bijections, so (seed, stream_id) pairs map to well-separated
// counter orbits.
//
// Reproducibility contract: a fixed (seed, stream_id) replays the identical
// sequence within this implementation. Bit-exactness across compilers or
// libms is not promised.
//
// One stream is single-owner mutable state. Concurrent callers take
// distinct stream_ids; sharing one stream across threads is forbidden.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed),
        stream_id_(stream_id),
        state_(detail::splitmix_finalize(seed + detail::kGoldenGamma) ^
               detail::splitmix_finalize(~stream_id * detail::kGoldenGamma +
                                         0x6a09e667f3bcc909ULL)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() {
    state_ += detail::kGoldenGamma;
    return detail::splitmix_finalize(state_);
  }

  // Uniform on [0, 1), 53 random bits.
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller. Draws land in pairs; the second draw
  // of each pair is cached, so one call consumes either two words or none.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 on (0, 1] keeps the log finite.
    const double u1 =
        (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline Vector sample_gaussian(RngStream& rng, std::size_t n) {
  if (n == 0) throw std::invalid_argument("sample_gaussian: n must be positive");
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = rng.next_gaussian();
  return out;
}

struct DiscreteOutcome {
  double value = 0.0;
  double probability = 0.0;
};

// Categorical sampling by cumulative walk over the outcomes in the order
// given. The final outcome absorbs the tail, so rounding in the cumulative
// sums never drops a draw.
inline Vector sample_discrete(RngStream& rng,
                              const std::vector<DiscreteOutcome>& outcomes,
                              std::size_t n) {
  if (n == 0) throw std::invalid_argument("sample_discrete: n must be positive");
  if (outcomes.empty()) {
    throw std::invalid_argument("sample_discrete: outcome list is empty");
  }
  double total = 0.0;
  for (const auto& o : outcomes) {
    if (!(o.probability >= 0.0)) {
      throw std::invalid_argument(
          "sample_discrete: probabilities must be nonnegative, got " +
          std::to_string(o.probability));
    }
    if (!std::isfinite(o.value)) {
      throw std::invalid_argument("sample_discrete: outcome value is not finite");
    }
    total += o.probability;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument(
        "sample_discrete: probabilities sum to " + std::to_string(total) +
        ", expected 1 within 1e-12");
  }
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.next_uniform();
    double cum = 0.0;
    double v = outcomes.back().value;
    for (const auto& o : outcomes) {
      cum += o.probability;
      if (u < cum) {
        v = o.value;
        break;
      }
    }
    out[i] = v;
  }
  return out;
}

}  // namespace rpkit
