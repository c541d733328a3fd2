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

#include "enar/random.h"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "gtest/gtest.h"

namespace enar {
namespace {

TEST(RandomTest, Fnv1aKnownVectors) {
  EXPECT_EQ(Fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(RandomTest, DeriveSeedIsPureAndSensitive) {
  const std::uint64_t s = DeriveSeed(42, "codeswitch", "doc", 3);
  EXPECT_EQ(s, DeriveSeed(42, "codeswitch", "doc", 3));
  EXPECT_NE(s, DeriveSeed(43, "codeswitch", "doc", 3));
  EXPECT_NE(s, DeriveSeed(42, "mask", "doc", 3));
  EXPECT_NE(s, DeriveSeed(42, "codeswitch", "doc2", 3));
  EXPECT_NE(s, DeriveSeed(42, "codeswitch", "doc", 4));
  EXPECT_NE(DeriveSeed(1, "ab", "c", 0), DeriveSeed(1, "a", "bc", 0));
}

TEST(RandomTest, UniformIntStaysInRange) {
  Rng rng(7);
  std::vector<int> hist(5, 0);
  for (int i = 0; i < 50000; ++i) ++hist[rng.UniformInt(5)];
  for (int h : hist) EXPECT_NEAR(h, 10000, 500);
}

TEST(RandomTest, Uniform01InUnitInterval) {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.Uniform01();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(RandomTest, ShuffleIsPermutationAndDeterministic) {
  std::vector<int> a(100);
  std::iota(a.begin(), a.end(), 0);
  std::vector<int> b = a;
  Rng r1(9);
  Rng r2(9);
  r1.Shuffle(a);
  r2.Shuffle(b);
  EXPECT_EQ(a, b);
  std::sort(b.begin(), b.end());
  for (int i = 0; i < 100; ++i) EXPECT_EQ(b[i], i);
}

}  // namespace
}  // namespace enar
