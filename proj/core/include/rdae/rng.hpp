// Copyright 2026 The rdae Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RDAE_RNG_HPP_
#define RDAE_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace rdae {

// std::mt19937_64 output is fully specified by the standard; the value
// transforms below are ours, so every draw is reproducible across
// compilers and standard libraries (std::*_distribution is not).
using Rng = std::mt19937_64;

// FNV-1a, used to derive independent, schedule-invariant RNG streams
// from (master seed, task identity) keys.
inline std::uint64_t hash64(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t stream_seed(std::uint64_t master, const std::string& key) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = hash64(h, &master, sizeof(master));
  h = hash64(h, key.data(), key.size());
  return h;
}

// Uniform in [0, n) without modulo bias.
inline std::uint64_t uniform_u64(Rng& rng, std::uint64_t n) {
  if (n == 0) return 0;
  const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// Uniform in [0, 1) with 53 random bits.
inline double uniform_real(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform in [lo, hi).
inline double uniform_real(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_real(rng);
}

// Box-Muller; one value per call, the pair's partner is discarded to keep
// the stream position independent of call parity.
inline double normal(Rng& rng) {
  double u1 = uniform_real(rng);
  double u2 = uniform_real(rng);
  while (u1 <= 0.0) u1 = uniform_real(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_u64(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace rdae

#endif  // RDAE_RNG_HPP_
