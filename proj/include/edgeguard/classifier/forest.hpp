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

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "edgeguard/classifier/tree.hpp"
#include "edgeguard/dataset/nslkdd.hpp"

namespace edgeguard::classifier {

// Identifies the random stream construction; stored in every model file.
inline constexpr std::string_view kRngDescription =
    "mt19937_64; tree seed = splitmix64(seed + 0x9e3779b97f4a7c15 * (tree_index + 1)); "
    "bounded draws by rejection of the top partial block";

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Deterministic per-tree random stream. Draws do not depend on the standard
// library's distribution implementations.
class TreeRng {
 public:
  TreeRng(std::uint64_t seed, std::uint64_t tree_index);
  // Uniform in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

// Bootstrap rows (when enabled) and a fresh feature subset per split, from a
// stream derived only from (seed, tree_index). Trees are independent, so the
// result does not depend on `threads` (0 = hardware concurrency).
std::vector<DecisionTree> fit_forest(std::span<const EncodedSample> samples, const TrainParams& params,
                                     unsigned threads = 0);

// Majority vote; ties go to normal; confidence is the winner's vote share.
Prediction vote(std::span<const DecisionTree> trees, std::span<const double> features);

struct DecisionTreeModel {
  DecisionTree tree;
  dataset::FeatureVocabulary vocab;
  TrainParams params;

  Prediction predict(std::span<const double> features) const { return tree.predict(features); }
};

struct RandomForestModel {
  std::vector<DecisionTree> trees;
  dataset::FeatureVocabulary vocab;
  TrainParams params;

  Prediction predict(std::span<const double> features) const { return vote(trees, features); }
};

using Model = std::variant<DecisionTreeModel, RandomForestModel>;

enum class ModelKind { decision_tree, random_forest };

ModelKind kind_of(const Model& model) noexcept;
std::string_view to_string(ModelKind kind) noexcept;
Prediction predict(const Model& model, std::span<const double> features);
const dataset::FeatureVocabulary& vocabulary(const Model& model) noexcept;
const TrainParams& params_of(const Model& model) noexcept;

// Builds the vocabulary from `records`, encodes them, and fits the model.
Model train(ModelKind kind, std::span<const dataset::ConnectionRecord> records, const TrainParams& params,
            unsigned threads = 0);

}  // namespace edgeguard::classifier
