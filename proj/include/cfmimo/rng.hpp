// Copyright 2026 The cfmimo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CFMIMO_RNG_HPP
#define CFMIMO_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace cfmimo {

using Rng = std::mt19937_64;

// Purpose tags keep substreams for different consumers disjoint even when the
// numeric indices coincide.
enum class StreamPurpose : std::uint32_t {
  kLayout = 1,
  kShadowing = 2,
  kPilots = 3,
  kChannel = 4,
  kMonteCarlo = 5,
  kInstance = 6,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic substream keyed by (seed, purpose, indices...). Independent of
// which thread asks for it or in what order. The key is folded through
// splitmix64 and seeds the engine directly; cheap enough to run per trial.
inline Rng make_stream(std::uint64_t seed, StreamPurpose purpose,
                       std::initializer_list<std::uint64_t> indices = {}) {
  std::uint64_t key = splitmix64(seed);
  key = splitmix64(key ^ static_cast<std::uint64_t>(purpose));
  for (std::uint64_t idx : indices) key = splitmix64(key ^ idx);
  return Rng(key);
}

// Circularly-symmetric complex Gaussian CN(0, variance).
class ComplexNormal {
 public:
  std::complex<double> operator()(Rng& rng, double variance) {
    const double s = std::sqrt(0.5 * variance);
    const double re = normal_(rng);
    const double im = normal_(rng);
    return {s * re, s * im};
  }

 private:
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace cfmimo

#endif  // CFMIMO_RNG_HPP
