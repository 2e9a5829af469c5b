/*
 * Copyright 2025 The ITM Bench Authors
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

#ifndef ITM_RNG_H
#define ITM_RNG_H

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace itm {

// Counter-based randomness. Every draw is a pure function of (key, counter),
// so results do not depend on thread scheduling, and unlike the standard
// distributions the mapping to doubles is fixed across standard libraries.

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t value) {
  return mix64(seed ^ mix64(value ^ 0x5851f42d4c957f2dULL));
}

// FNV-1a of the label, folded into the seed. Names a sub-stream.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return derive_seed(seed, h);
}

// Uniform in the open interval (0, 1).
constexpr double to_unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal draw keyed by `key` (Box-Muller, cosine branch).
inline double keyed_normal(std::uint64_t key) {
  const double u1 = to_unit_open(mix64(key));
  const double u2 = to_unit_open(mix64(key ^ 0xd1b54a32d192ed03ULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }
  double uniform() { return to_unit_open(next_u64()); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() { return keyed_normal(next_u64()); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace itm

#endif  // ITM_RNG_H
