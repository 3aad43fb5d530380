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


#pragma once

// Exact split scoring shared by best_split() and the tree builder.
//
// For a binary partition into L and R of a node with n samples, the weighted
// child Gini is 1 - S/n with S = sq(L)/|L| + sq(R)/|R| and sq(X) = x0^2 + x1^2.
// Maximizing the gain is maximizing S, which is kept as the fraction num/den
// so candidates compare exactly and ties resolve deterministically.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "edgeguard/classifier/tree.hpp"

namespace edgeguard::classifier::detail {

using u128 = unsigned __int128;

// Bound keeping every cross product below 2^128.
inline constexpr std::size_t kMaxTrainingRows = std::size_t{1} << 24;

struct ScoredSplit {
  std::size_t feature = 0;
  double threshold = 0.0;
  u128 num = 0;
  u128 den = 1;
};

inline bool strictly_better(const ScoredSplit& a, const ScoredSplit& b) { return a.num * b.den > b.num * a.den; }

inline std::uint64_t sum_sq(std::uint64_t a, std::uint64_t b) { return a * a + b * b; }

// `entries` holds (value, class) pairs for one feature, sorted by value.
inline void scan_feature(std::size_t feature, const std::vector<std::pair<double, std::uint8_t>>& entries,
                         const ClassCounts& totals, std::uint32_t min_leaf, std::optional<ScoredSplit>& best) {
  const std::size_t n = entries.size();
  std::uint64_t left[2] = {0, 0};
  for (std::size_t k = 0; k + 1 < n; ++k) {
    ++left[entries[k].second];
    if (entries[k + 1].first == entries[k].first) continue;
    const std::uint64_t n_left = k + 1;
    const std::uint64_t n_right = n - n_left;
    if (n_left < min_leaf || n_right < min_leaf) continue;
    const std::uint64_t r0 = totals[0] - left[0];
    const std::uint64_t r1 = totals[1] - left[1];
    ScoredSplit cand;
    cand.feature = feature;
    cand.threshold = (entries[k].first + entries[k + 1].first) / 2.0;
    cand.num = u128{sum_sq(left[0], left[1])} * n_right + u128{sum_sq(r0, r1)} * n_left;
    cand.den = u128{n_left} * n_right;
    if (!best || strictly_better(cand, *best)) best = cand;
  }
}

// True when the split strictly lowers impurity: S > sq(parent)/n.
inline bool has_positive_gain(const ScoredSplit& s, const ClassCounts& totals) {
  const std::uint64_t n = totals[0] + totals[1];
  return s.num * n > u128{sum_sq(totals[0], totals[1])} * s.den;
}

inline double gain_of(const ScoredSplit& s, const ClassCounts& totals) {
  const double n = static_cast<double>(totals[0] + totals[1]);
  const double score = static_cast<double>(s.num) / static_cast<double>(s.den);
  return score / n - static_cast<double>(sum_sq(totals[0], totals[1])) / (n * n);
}

}  // namespace edgeguard::classifier::detail
