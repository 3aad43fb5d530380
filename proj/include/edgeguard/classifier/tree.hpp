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

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "edgeguard/dataset/nslkdd.hpp"

namespace edgeguard::classifier {

using dataset::EncodedSample;
using dataset::kFeatureCount;
using dataset::TrafficClass;

// Per-class sample counts, indexed by TrafficClass.
using ClassCounts = std::array<std::uint64_t, 2>;

struct TrainParams {
  std::optional<std::uint32_t> max_depth;  // unbounded when empty
  std::uint32_t min_samples_split = 2;
  std::uint32_t min_samples_leaf = 1;
  // Forest only.
  std::uint32_t n_trees = 100;
  std::uint32_t features_per_split = 6;  // floor(sqrt(41))
  bool bootstrap = true;
  std::uint64_t seed = 42;

  // Throws std::invalid_argument on out-of-range values.
  void validate() const;
  bool operator==(const TrainParams&) const = default;
};

// Gini impurity 1 - sum(p_i^2). Throws std::invalid_argument for an empty node.
double gini(const ClassCounts& counts);

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

// Best (feature, threshold) over the midpoints between consecutive distinct
// values of each candidate feature, maximizing the Gini decrease. Candidate
// splits are compared in exact integer arithmetic; ties go to the lowest
// feature index, then the lowest threshold. Empty result when no split has a
// strictly positive gain or every split would leave a child smaller than
// `min_samples_leaf`.
std::optional<Split> best_split(std::span<const EncodedSample> samples, std::span<const std::size_t> candidate_features,
                                std::uint32_t min_samples_leaf = 1);

struct Prediction {
  TrafficClass label = TrafficClass::normal;
  double confidence = 0.0;
};

// Majority class of a leaf; ties go to normal.
Prediction leaf_prediction(const ClassCounts& counts);

// Binary tree stored as a pre-order node array. An internal node's left child
// immediately follows it; `right` is the index of its right child.
class DecisionTree {
 public:
  struct Node {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::uint32_t right = 0;
    ClassCounts counts{};

    bool is_leaf() const noexcept { return feature < 0; }
    bool operator==(const Node&) const = default;
  };

  // Validates the pre-order layout; throws std::invalid_argument if malformed.
  explicit DecisionTree(std::vector<Node> nodes);

  // Routes value <= threshold to the left child. Throws std::invalid_argument
  // unless features.size() == 41.
  Prediction predict(std::span<const double> features) const;

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  std::size_t depth() const noexcept { return depth_; }
  std::size_t leaf_count() const noexcept;

  bool operator==(const DecisionTree& other) const { return nodes_ == other.nodes_; }

 private:
  std::vector<Node> nodes_;
  std::size_t depth_ = 0;
};

// Fills `out` with the candidate features for one split. Called once per node.
using FeatureSelector = std::function<void(std::vector<std::size_t>& out)>;

// Recursive CART. Each node becomes a leaf when it is pure, the depth limit is
// reached, it holds fewer than min_samples_split samples, or no candidate
// split has positive gain. Without a selector every feature is a candidate.
DecisionTree fit_tree(std::span<const EncodedSample> samples, const TrainParams& params,
                      const FeatureSelector& selector = {});

// Same, over a multiset of row indices into `samples` (bootstrap draws).
DecisionTree fit_tree(std::span<const EncodedSample> samples, std::vector<std::uint32_t> rows,
                      const TrainParams& params, const FeatureSelector& selector = {});

}  // namespace edgeguard::classifier
