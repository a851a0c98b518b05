// Copyright 2026 The snnkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>

#include "snnkit/check.hpp"

namespace snnkit {

// Counter-based splittable generator. Every output is the SplitMix64
// finalizer applied to key + counter * GOLDEN, where the key is derived
// from (seed, stream). The construction is fixed so that any consumer —
// in this codebase or a reimplementation — reproduces identical streams
// from the same (seed, stream, counter) triple:
//
//   mix(z)  = splitmix64 finalizer (Stafford variant 13)
//   key     = mix(mix(seed + GOLDEN) ^ mix(stream + LEAF))
//   out[i]  = mix(key + (i + 1) * GOLDEN)
//   child k = Rng with key' = mix(key ^ mix(k + CHILD))
//
// GOLDEN = 0x9E3779B97F4A7C15, LEAF = 0xD1B54A32D192ED03,
// CHILD = 0x632BE59BD9B4E019.
class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0)
      : key_(mix(mix(seed + kGolden) ^ mix(stream + kLeaf))) {}

  // Derived stream; independent of how many draws were made so far.
  Rng child(uint64_t index) const {
    Rng r;
    r.key_ = mix(key_ ^ mix(index + kChild));
    return r;
  }

  uint64_t next_u64() { return mix(key_ + (++counter_) * kGolden); }

  // Uniform on [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi).
  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Standard normal via Box-Muller; consumes two uniforms per call.
  double next_gaussian() {
    double u1 = next_double();
    while (u1 == 0.0) u1 = next_double();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  // Uniform on {0, ..., n-1}, rejection sampled to avoid modulo bias.
  uint64_t next_below(uint64_t n) {
    SNNKIT_CHECK(n > 0, "next_below requires n > 0");
    const uint64_t bound = ~uint64_t{0} - (~uint64_t{0} % n);
    uint64_t v = next_u64();
    while (v >= bound) v = next_u64();
    return v % n;
  }

 private:
  Rng() = default;

  static constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  static constexpr uint64_t kLeaf = 0xD1B54A32D192ED03ULL;
  static constexpr uint64_t kChild = 0x632BE59BD9B4E019ULL;
  static constexpr double kPi = 3.14159265358979323846;

  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  uint64_t key_ = 0;
  uint64_t counter_ = 0;
};

}  // namespace snnkit
