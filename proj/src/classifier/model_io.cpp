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


#include "edgeguard/classifier/model_io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace edgeguard::classifier {

using nlohmann::json;
using Reason = ModelFormatError::Reason;

namespace {

constexpr std::string_view kMagic = "edgeguard-model";

const std::array<std::pair<std::size_t, const char*>, 3> kVocabColumns{{
    {dataset::kProtocolColumn, "protocol_type"},
    {dataset::kServiceColumn, "service"},
    {dataset::kFlagColumn, "flag"},
}};

json params_to_json(const TrainParams& p) {
  json j;
  j["max_depth"] = p.max_depth ? json(*p.max_depth) : json(nullptr);
  j["min_samples_split"] = p.min_samples_split;
  j["min_samples_leaf"] = p.min_samples_leaf;
  j["n_trees"] = p.n_trees;
  j["features_per_split"] = p.features_per_split;
  j["bootstrap"] = p.bootstrap;
  j["seed"] = p.seed;
  return j;
}

TrainParams params_from_json(const json& j) {
  TrainParams p;
  if (!j.at("max_depth").is_null()) p.max_depth = j.at("max_depth").get<std::uint32_t>();
  p.min_samples_split = j.at("min_samples_split").get<std::uint32_t>();
  p.min_samples_leaf = j.at("min_samples_leaf").get<std::uint32_t>();
  p.n_trees = j.at("n_trees").get<std::uint32_t>();
  p.features_per_split = j.at("features_per_split").get<std::uint32_t>();
  p.bootstrap = j.at("bootstrap").get<bool>();
  p.seed = j.at("seed").get<std::uint64_t>();
  return p;
}

void write_tree(const DecisionTree& tree, std::size_t index, std::ostream& out) {
  out << json{{"tree", index}, {"depth", tree.depth()}, {"node_count", tree.nodes().size()}}.dump() << '\n';
  for (const auto& n : tree.nodes()) {
    json line = n.is_leaf() ? json::array({"leaf", n.counts[0], n.counts[1]})
                            : json::array({"split", n.feature, n.threshold, n.counts[0], n.counts[1]});
    out << line.dump() << '\n';
  }
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  json next(const char* what) {
    std::string line;
    if (!std::getline(in_, line)) {
      throw ModelFormatError(Reason::truncated, std::string("model file truncated: missing ") + what);
    }
    ++line_no_;
    try {
      return json::parse(line);
    } catch (const json::parse_error&) {
      throw ModelFormatError(Reason::corrupt, "model file line " + std::to_string(line_no_) + ": invalid syntax");
    }
  }

  bool at_end() {
    std::string rest;
    while (std::getline(in_, rest)) {
      if (!rest.empty()) return false;
    }
    return true;
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

DecisionTree read_tree(LineReader& reader, std::size_t expected_index, const TrainParams& params) {
  const json header = reader.next("tree header");
  if (!header.is_object() || header.at("tree").get<std::size_t>() != expected_index) {
    throw ModelFormatError(Reason::corrupt, "tree header out of sequence");
  }
  const auto node_count = header.at("node_count").get<std::size_t>();
  const auto depth = header.at("depth").get<std::size_t>();
  if (node_count == 0) throw ModelFormatError(Reason::corrupt, "tree with no nodes");

  std::vector<DecisionTree::Node> nodes;
  nodes.reserve(node_count);
  for (std::size_t i = 0; i < node_count; ++i) {
    const json line = reader.next("tree node");
    if (!line.is_array() || line.empty()) throw ModelFormatError(Reason::corrupt, "node is not an array");
    DecisionTree::Node node;
    const auto tag = line.at(0).get<std::string>();
    if (tag == "leaf" && line.size() == 3) {
      node.counts = {line.at(1).get<std::uint64_t>(), line.at(2).get<std::uint64_t>()};
    } else if (tag == "split" && line.size() == 5) {
      node.feature = line.at(1).get<std::int32_t>();
      if (node.feature < 0) throw ModelFormatError(Reason::corrupt, "negative split feature");
      node.threshold = line.at(2).get<double>();
      node.counts = {line.at(3).get<std::uint64_t>(), line.at(4).get<std::uint64_t>()};
    } else {
      throw ModelFormatError(Reason::corrupt, "unknown node encoding at line " + std::to_string(reader.line_no()));
    }
    nodes.push_back(node);
  }

  // Right-child links are implied by the pre-order layout.
  std::vector<std::size_t> pending;  // internal nodes whose left subtree is open
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i > 0 && nodes[i - 1].is_leaf()) {
      if (pending.empty()) throw ModelFormatError(Reason::corrupt, "tree has dangling nodes");
      nodes[pending.back()].right = static_cast<std::uint32_t>(i);
      pending.pop_back();
    }
    if (!nodes[i].is_leaf()) pending.push_back(i);
  }
  if (!pending.empty() || !nodes.back().is_leaf()) {
    throw ModelFormatError(Reason::corrupt, "tree is incomplete");
  }

  std::optional<DecisionTree> tree;
  try {
    tree.emplace(std::move(nodes));
  } catch (const std::invalid_argument& e) {
    throw ModelFormatError(Reason::corrupt, e.what());
  }
  if (tree->depth() != depth) throw ModelFormatError(Reason::corrupt, "tree depth does not match header");
  if (params.max_depth && tree->depth() > *params.max_depth) {
    throw ModelFormatError(Reason::corrupt, "tree deeper than max_depth");
  }
  const auto& ns = tree->nodes();
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const auto& n = ns[i];
    if (n.is_leaf()) {
      if (ns.size() > 1 && n.counts[0] + n.counts[1] < params.min_samples_leaf) {
        throw ModelFormatError(Reason::corrupt, "leaf smaller than min_samples_leaf");
      }
    } else {
      const auto& l = ns[i + 1].counts;
      const auto& r = ns[n.right].counts;
      if (n.counts[0] != l[0] + r[0] || n.counts[1] != l[1] + r[1]) {
        throw ModelFormatError(Reason::corrupt, "node counts do not match children");
      }
    }
  }
  return std::move(*tree);
}

}  // namespace

void save_model(const Model& model, std::ostream& out) {
  const auto& p = params_of(model);
  const auto& vocab = vocabulary(model);
  json v = json::object();
  for (const auto& [column, name] : kVocabColumns) v[name] = vocab.tokens(column);

  const std::vector<const DecisionTree*> trees = std::visit(
      [](const auto& m) {
        std::vector<const DecisionTree*> out;
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, DecisionTreeModel>) {
          out.push_back(&m.tree);
        } else {
          for (const auto& t : m.trees) out.push_back(&t);
        }
        return out;
      },
      model);

  json header;
  header["format"] = kMagic;
  header["format_version"] = kModelFormatVersion;
  header["model_kind"] = to_string(kind_of(model));
  header["params"] = params_to_json(p);
  header["rng"] = kRngDescription;
  header["vocab"] = std::move(v);
  header["tree_count"] = trees.size();
  out << header.dump() << '\n';
  for (std::size_t i = 0; i < trees.size(); ++i) write_tree(*trees[i], i, out);
  out << json{{"end", kMagic}, {"tree_count", trees.size()}}.dump() << '\n';
  if (!out) throw std::runtime_error("save_model: write failed");
}

void save_model(const Model& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open model file '" + path + "' for writing");
  save_model(model, out);
}

Model load_model(std::istream& in) {
  LineReader reader(in);
  try {
    const json header = reader.next("header");
    if (!header.is_object() || header.value("format", "") != kMagic) {
      throw ModelFormatError(Reason::corrupt, "not an edgeguard model file");
    }
    const int version = header.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw ModelFormatError(Reason::version, "unsupported model format_version " + std::to_string(version) +
                                                  " (expected " + std::to_string(kModelFormatVersion) + ")");
    }
    const auto kind = header.at("model_kind").get<std::string>();
    if (kind != to_string(ModelKind::decision_tree) && kind != to_string(ModelKind::random_forest)) {
      throw ModelFormatError(Reason::corrupt, "unknown model_kind '" + kind + "'");
    }
    const TrainParams params = params_from_json(header.at("params"));
    try {
      params.validate();
    } catch (const std::invalid_argument& e) {
      throw ModelFormatError(Reason::corrupt, std::string("invalid params: ") + e.what());
    }

    dataset::FeatureVocabulary vocab;
    for (const auto& [column, name] : kVocabColumns) {
      for (const auto& token : header.at("vocab").at(name)) {
        const auto t = token.get<std::string>();
        if (t.empty() || vocab.index_of(column, t) != dataset::FeatureVocabulary::kUnseen) {
          throw ModelFormatError(Reason::corrupt, "vocabulary token empty or repeated");
        }
        vocab.add(column, t);
      }
    }

    const auto tree_count = header.at("tree_count").get<std::size_t>();
    const bool is_tree = kind == to_string(ModelKind::decision_tree);
    if (tree_count == 0 || (is_tree && tree_count != 1) || (!is_tree && tree_count != params.n_trees)) {
      throw ModelFormatError(Reason::corrupt, "tree_count inconsistent with model kind");
    }
    std::vector<DecisionTree> trees;
    trees.reserve(tree_count);
    for (std::size_t i = 0; i < tree_count; ++i) trees.push_back(read_tree(reader, i, params));

    const json trailer = reader.next("trailer");
    if (!trailer.is_object() || trailer.value("end", "") != kMagic ||
        trailer.at("tree_count").get<std::size_t>() != tree_count) {
      throw ModelFormatError(Reason::corrupt, "bad trailer");
    }
    if (!reader.at_end()) throw ModelFormatError(Reason::corrupt, "trailing data after model");

    if (is_tree) return DecisionTreeModel{std::move(trees.front()), std::move(vocab), params};
    return RandomForestModel{std::move(trees), std::move(vocab), params};
  } catch (const json::exception& e) {
    throw ModelFormatError(Reason::corrupt, std::string("model file: ") + e.what());
  }
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file '" + path + "'");
  return load_model(in);
}

}  // namespace edgeguard::classifier
