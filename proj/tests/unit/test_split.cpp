/*
 * Copyright 2026 The EdgeGuard Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <doctest.h>

#include <numeric>
#include <random>

#include "edgeguard/classifier/tree.hpp"
#include "split_oracle.hpp"

using namespace edgeguard::classifier;
using edgeguard::dataset::EncodedSample;

namespace {

EncodedSample sample(std::initializer_list<double> xs, int cls) {
  EncodedSample s;
  std::size_t i = 0;
  for (double x : xs) s.features[i++] = x;
  s.label = cls ? TrafficClass::attack : TrafficClass::normal;
  return s;
}

std::vector<std::size_t> first_features(std::size_t k) {
  std::vector<std::size_t> f(k);
  std::iota(f.begin(), f.end(), std::size_t{0});
  return f;
}

}  // namespace

TEST_CASE("gini") {
  CHECK(gini({10, 0}) == 0.0);
  CHECK(gini({5, 5}) == 0.5);
  CHECK(gini({3, 1}) == doctest::Approx(0.375).epsilon(1e-15));
  CHECK_THROWS_AS(gini({0, 0}), std::invalid_argument);
}

TEST_CASE("best_split on two points picks the single midpoint") {
  const std::vector<EncodedSample> s{sample({1}, 0), sample({3}, 1)};
  const auto f = first_features(1);
  const auto split = best_split(s, f);
  REQUIRE(split);
  CHECK(split->feature == 0);
  CHECK(split->threshold == 2.0);
  CHECK(split->gain == doctest::Approx(0.5));
}

TEST_CASE("best_split returns nothing when features are constant") {
  const std::vector<EncodedSample> s{sample({1, 7}, 0), sample({1, 7}, 1), sample({1, 7}, 1)};
  const auto f = first_features(2);
  CHECK_FALSE(best_split(s, f));
}

TEST_CASE("best_split returns nothing when no split lowers impurity") {
  // x = 1,2 with labels 0,1 then 0,1 again: every split leaves both sides mixed evenly.
  const std::vector<EncodedSample> s{sample({1}, 0), sample({1}, 1), sample({2}, 0), sample({2}, 1)};
  const auto f = first_features(1);
  CHECK_FALSE(best_split(s, f));
}

TEST_CASE("best_split tie-break prefers the lowest feature, then the lowest threshold") {
  // Features 0 and 1 are identical copies, so every candidate on one has a twin on the other.
  const std::vector<EncodedSample> s{sample({1, 1}, 0), sample({2, 2}, 1), sample({3, 3}, 0), sample({4, 4}, 1)};
  const std::vector<std::size_t> reversed{1, 0};
  const auto split = best_split(s, reversed);
  REQUIRE(split);
  CHECK(split->feature == 0);
  // Thresholds 1.5 and 3.5 tie exactly (each isolates one pure sample); 1.5 is lower.
  CHECK(split->threshold == 1.5);
}

TEST_CASE("best_split honors min_samples_leaf") {
  const std::vector<EncodedSample> s{sample({1}, 1), sample({2}, 0), sample({3}, 0), sample({4}, 0)};
  const auto f = first_features(1);
  const auto free = best_split(s, f, 1);
  REQUIRE(free);
  CHECK(free->threshold == 1.5);
  const auto constrained = best_split(s, f, 2);
  REQUIRE(constrained);
  CHECK(constrained->threshold == 2.5);
  CHECK_FALSE(best_split(s, f, 3));
}

TEST_CASE("8-sample 2-feature set agrees with the brute-force oracle") {
  const std::vector<EncodedSample> s{sample({0, 5}, 0), sample({1, 3}, 0), sample({2, 8}, 1), sample({3, 1}, 0),
                                     sample({4, 7}, 1), sample({5, 2}, 1), sample({6, 6}, 1), sample({7, 4}, 0)};
  const auto f = first_features(2);
  const auto got = best_split(s, f);
  const auto want = edgeguard::testing::brute_force_split(s, f);
  REQUIRE(got);
  REQUIRE(want);
  CHECK(got->feature == want->feature);
  CHECK(got->threshold == want->threshold);
  CHECK(got->gain == doctest::Approx(want->gain).epsilon(1e-12));
}

TEST_CASE("best_split matches the oracle on random small datasets") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 60)(rng);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
    const int levels = std::uniform_int_distribution<int>(2, 8)(rng);
    std::vector<EncodedSample> s(n);
    for (auto& x : s) {
      for (std::size_t j = 0; j < k; ++j) x.features[j] = std::uniform_int_distribution<int>(0, levels)(rng);
      x.label = std::bernoulli_distribution(0.4)(rng) ? TrafficClass::attack : TrafficClass::normal;
    }
    const auto f = first_features(k);
    const std::uint32_t min_leaf = std::uniform_int_distribution<std::uint32_t>(1, 3)(rng);
    const auto got = best_split(s, f, min_leaf);
    const auto want = edgeguard::testing::brute_force_split(s, f, min_leaf);
    REQUIRE(got.has_value() == want.has_value());
    if (got) {
      CHECK(got->feature == want->feature);
      CHECK(got->threshold == want->threshold);
      CHECK(got->gain == doctest::Approx(want->gain).epsilon(1e-12));
    }
  }
}
