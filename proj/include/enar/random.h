// Copyright 2026 The enar Authors
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

#ifndef ENAR_RANDOM_H_
#define ENAR_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace enar {

// Stable 64-bit FNV-1a. Used for seed derivation, so it must never change.
std::uint64_t Fnv1a64(std::string_view data);

std::uint64_t SplitMix64(std::uint64_t x);

// Per-item seed for parallel stages: a pure function of the master seed, a
// stream tag, a string key (usually a doc id) and an ordinal. Work items
// seeded this way produce the same output for any thread count.
std::uint64_t DeriveSeed(std::uint64_t master, std::string_view tag,
                         std::string_view key, std::uint64_t ordinal);

// mt19937_64 with distribution code written out explicitly; the standard
// library distributions are implementation-defined and would make outputs
// differ across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool Bernoulli(double p) { return Uniform01() < p; }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t UniformInt(std::uint64_t n);

  template <typename T>
  void Shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = UniformInt(i);
      using std::swap;
      swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace enar

#endif  // ENAR_RANDOM_H_
