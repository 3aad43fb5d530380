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


#include "edgeguard/classifier/tree.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "split_scan.hpp"

namespace edgeguard::classifier {

using detail::ScoredSplit;

void TrainParams::validate() const {
  if (max_depth && *max_depth == 0) throw std::invalid_argument("max_depth must be positive");
  if (min_samples_split == 0) throw std::invalid_argument("min_samples_split must be positive");
  if (min_samples_leaf == 0) throw std::invalid_argument("min_samples_leaf must be positive");
  if (min_samples_leaf > min_samples_split) {
    throw std::invalid_argument("min_samples_leaf must not exceed min_samples_split");
  }
  if (n_trees == 0) throw std::invalid_argument("n_trees must be at least 1");
  if (features_per_split == 0 || features_per_split > kFeatureCount) {
    throw std::invalid_argument("features_per_split must be in [1, 41]");
  }
}

double gini(const ClassCounts& counts) {
  const auto total = counts[0] + counts[1];
  if (total == 0) throw std::invalid_argument("gini: empty node");
  const double p0 = static_cast<double>(counts[0]) / static_cast<double>(total);
  const double p1 = static_cast<double>(counts[1]) / static_cast<double>(total);
  return 1.0 - (p0 * p0 + p1 * p1);
}

Prediction leaf_prediction(const ClassCounts& counts) {
  const auto total = counts[0] + counts[1];
  if (total == 0) return {TrafficClass::normal, 0.0};
  const bool attack = counts[1] > counts[0];
  const auto winner = attack ? counts[1] : counts[0];
  return {attack ? TrafficClass::attack : TrafficClass::normal,
          static_cast<double>(winner) / static_cast<double>(total)};
}

std::optional<Split> best_split(std::span<const EncodedSample> samples, std::span<const std::size_t> candidate_features,
                                std::uint32_t min_samples_leaf) {
  if (samples.size() < 2) return std::nullopt;
  ClassCounts totals{};
  for (const auto& s : samples) ++totals[dataset::index(s.label)];

  std::vector<std::size_t> features(candidate_features.begin(), candidate_features.end());
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());

  std::optional<ScoredSplit> best;
  std::vector<std::pair<double, std::uint8_t>> entries(samples.size());
  for (std::size_t f : features) {
    if (f >= kFeatureCount) throw std::invalid_argument("best_split: feature index out of range");
    for (std::size_t i = 0; i < samples.size(); ++i) {
      entries[i] = {samples[i].features[f], static_cast<std::uint8_t>(samples[i].label)};
    }
    std::sort(entries.begin(), entries.end());
    detail::scan_feature(f, entries, totals, min_samples_leaf, best);
  }
  if (!best || !detail::has_positive_gain(*best, totals)) return std::nullopt;
  return Split{best->feature, best->threshold, detail::gain_of(*best, totals)};
}

DecisionTree::DecisionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  const std::size_t n = nodes_.size();
  if (n == 0) throw std::invalid_argument("tree has no nodes");
  // end[i] is one past the last node of the subtree rooted at i.
  std::vector<std::size_t> end(n);
  for (std::size_t i = n; i-- > 0;) {
    const Node& node = nodes_[i];
    if (node.is_leaf()) {
      end[i] = i + 1;
      continue;
    }
    if (node.feature >= static_cast<std::int32_t>(kFeatureCount)) {
      throw std::invalid_argument("node " + std::to_string(i) + ": feature index out of range");
    }
    if (i + 1 >= n || node.right <= i + 1 || node.right >= n || end[i + 1] != node.right) {
      throw std::invalid_argument("node " + std::to_string(i) + ": malformed child layout");
    }
    end[i] = end[node.right];
  }
  if (end[0] != n) throw std::invalid_argument("tree has unreachable nodes");

  std::vector<std::size_t> depth(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (nodes_[i].is_leaf()) {
      depth_ = std::max(depth_, depth[i]);
    } else {
      depth[i + 1] = depth[i] + 1;
      depth[nodes_[i].right] = depth[i] + 1;
    }
  }
}

Prediction DecisionTree::predict(std::span<const double> features) const {
  if (features.size() != kFeatureCount) {
    throw std::invalid_argument("predict: expected 41 features, got " + std::to_string(features.size()));
  }
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const Node& node = nodes_[i];
    i = features[static_cast<std::size_t>(node.feature)] <= node.threshold ? i + 1 : node.right;
  }
  return leaf_prediction(nodes_[i].counts);
}

std::size_t DecisionTree::leaf_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(std::span<const EncodedSample> samples, const TrainParams& params, const FeatureSelector& selector)
      : samples_(samples), params_(params), selector_(selector) {}

  std::vector<DecisionTree::Node> build(std::vector<std::uint32_t> rows) {
    struct Task {
      std::vector<std::uint32_t> rows;
      std::size_t depth;
      std::optional<std::size_t> parent;  // set when this task is a right child
    };
    std::vector<Task> stack;
    stack.push_back({std::move(rows), 0, std::nullopt});
    std::vector<std::size_t> candidates;

    while (!stack.empty()) {
      Task task = std::move(stack.back());
      stack.pop_back();

      const std::size_t id = nodes_.size();
      if (task.parent) nodes_[*task.parent].right = static_cast<std::uint32_t>(id);
      DecisionTree::Node node;
      for (auto r : task.rows) ++node.counts[dataset::index(samples_[r].label)];

      std::optional<ScoredSplit> split;
      const bool pure = node.counts[0] == 0 || node.counts[1] == 0;
      const bool depth_capped = params_.max_depth && task.depth >= *params_.max_depth;
      if (!pure && !depth_capped && task.rows.size() >= params_.min_samples_split) {
        candidates.clear();
        if (selector_) {
          selector_(candidates);
          std::sort(candidates.begin(), candidates.end());
        } else {
          candidates.resize(kFeatureCount);
          std::iota(candidates.begin(), candidates.end(), std::size_t{0});
        }
        split = search(task.rows, candidates, node.counts);
      }

      if (!split) {
        nodes_.push_back(node);
        continue;
      }
      node.feature = static_cast<std::int32_t>(split->feature);
      node.threshold = split->threshold;
      nodes_.push_back(node);

      std::vector<std::uint32_t> left;
      std::vector<std::uint32_t> right;
      for (auto r : task.rows) {
        (samples_[r].features[split->feature] <= split->threshold ? left : right).push_back(r);
      }
      task.rows = {};
      stack.push_back({std::move(right), task.depth + 1, id});
      stack.push_back({std::move(left), task.depth + 1, std::nullopt});
    }
    return std::move(nodes_);
  }

 private:
  std::optional<ScoredSplit> search(const std::vector<std::uint32_t>& rows, const std::vector<std::size_t>& features,
                                    const ClassCounts& totals) {
    std::optional<ScoredSplit> best;
    entries_.resize(rows.size());
    for (std::size_t f : features) {
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& s = samples_[rows[i]];
        entries_[i] = {s.features[f], static_cast<std::uint8_t>(s.label)};
      }
      std::sort(entries_.begin(), entries_.end());
      detail::scan_feature(f, entries_, totals, params_.min_samples_leaf, best);
    }
    if (best && !detail::has_positive_gain(*best, totals)) best.reset();
    return best;
  }

  std::span<const EncodedSample> samples_;
  const TrainParams& params_;
  const FeatureSelector& selector_;
  std::vector<DecisionTree::Node> nodes_;
  std::vector<std::pair<double, std::uint8_t>> entries_;
};

}  // namespace

DecisionTree fit_tree(std::span<const EncodedSample> samples, std::vector<std::uint32_t> rows,
                      const TrainParams& params, const FeatureSelector& selector) {
  if (samples.empty() || rows.empty()) throw dataset::EmptyDatasetError("fit_tree: no training samples");
  if (rows.size() > detail::kMaxTrainingRows) throw std::invalid_argument("fit_tree: too many training rows");
  params.validate();
  for (auto r : rows) {
    if (r >= samples.size()) throw std::invalid_argument("fit_tree: row index out of range");
  }
  return DecisionTree(TreeBuilder(samples, params, selector).build(std::move(rows)));
}

DecisionTree fit_tree(std::span<const EncodedSample> samples, const TrainParams& params,
                      const FeatureSelector& selector) {
  std::vector<std::uint32_t> rows(samples.size());
  std::iota(rows.begin(), rows.end(), std::uint32_t{0});
  return fit_tree(samples, std::move(rows), params, selector);
}

}  // namespace edgeguard::classifier
