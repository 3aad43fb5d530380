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


#include "edgeguard/classifier/forest.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <numeric>
#include <optional>
#include <thread>

namespace edgeguard::classifier {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

TreeRng::TreeRng(std::uint64_t seed, std::uint64_t tree_index)
    : engine_(splitmix64(seed + 0x9e3779b97f4a7c15ULL * (tree_index + 1))) {}

std::uint64_t TreeRng::below(std::uint64_t bound) {
  // Values below `floor` would over-represent the low residues.
  const std::uint64_t floor = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t v = engine_();
    if (v >= floor) return v % bound;
  }
}

namespace {

DecisionTree fit_one(std::span<const EncodedSample> samples, const TrainParams& params, std::size_t tree_index) {
  TreeRng rng(params.seed, tree_index);

  std::vector<std::uint32_t> rows(samples.size());
  if (params.bootstrap) {
    for (auto& r : rows) r = static_cast<std::uint32_t>(rng.below(samples.size()));
  } else {
    std::iota(rows.begin(), rows.end(), std::uint32_t{0});
  }

  std::vector<std::size_t> pool(kFeatureCount);
  const std::size_t k = params.features_per_split;
  FeatureSelector selector = [&](std::vector<std::size_t>& out) {
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    // Partial Fisher-Yates: the first k slots become a uniform k-subset.
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(kFeatureCount - i));
      std::swap(pool[i], pool[j]);
    }
    out.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
  };
  return fit_tree(samples, std::move(rows), params, selector);
}

}  // namespace

std::vector<DecisionTree> fit_forest(std::span<const EncodedSample> samples, const TrainParams& params,
                                     unsigned threads) {
  params.validate();
  if (samples.empty()) throw dataset::EmptyDatasetError("fit_forest: no training samples");

  std::vector<std::optional<DecisionTree>> slots(params.n_trees);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < slots.size(); i = next++) {
      try {
        slots[i].emplace(fit_one(samples, params, i));
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, params.n_trees);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<DecisionTree> trees;
  trees.reserve(slots.size());
  for (auto& s : slots) trees.push_back(std::move(*s));
  return trees;
}

Prediction vote(std::span<const DecisionTree> trees, std::span<const double> features) {
  if (trees.empty()) throw std::invalid_argument("vote: forest has no trees");
  std::size_t attack_votes = 0;
  for (const auto& t : trees) {
    if (t.predict(features).label == TrafficClass::attack) ++attack_votes;
  }
  const std::size_t normal_votes = trees.size() - attack_votes;
  const bool attack = attack_votes > normal_votes;
  return {attack ? TrafficClass::attack : TrafficClass::normal,
          static_cast<double>(attack ? attack_votes : normal_votes) / static_cast<double>(trees.size())};
}

ModelKind kind_of(const Model& model) noexcept {
  return std::holds_alternative<DecisionTreeModel>(model) ? ModelKind::decision_tree : ModelKind::random_forest;
}

std::string_view to_string(ModelKind kind) noexcept {
  return kind == ModelKind::decision_tree ? "decision_tree" : "random_forest";
}

Prediction predict(const Model& model, std::span<const double> features) {
  return std::visit([&](const auto& m) { return m.predict(features); }, model);
}

const dataset::FeatureVocabulary& vocabulary(const Model& model) noexcept {
  return std::visit([](const auto& m) -> const dataset::FeatureVocabulary& { return m.vocab; }, model);
}

const TrainParams& params_of(const Model& model) noexcept {
  return std::visit([](const auto& m) -> const TrainParams& { return m.params; }, model);
}

Model train(ModelKind kind, std::span<const dataset::ConnectionRecord> records, const TrainParams& params,
            unsigned threads) {
  auto vocab = dataset::build_vocabulary(records);
  const auto samples = dataset::encode_all(records, vocab);
  if (kind == ModelKind::decision_tree) {
    return DecisionTreeModel{fit_tree(samples, params), std::move(vocab), params};
  }
  return RandomForestModel{fit_forest(samples, params, threads), std::move(vocab), params};
}

}  // namespace edgeguard::classifier
