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

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "edgeguard/classifier/forest.hpp"

namespace edgeguard::classifier {

inline constexpr int kModelFormatVersion = 1;

class ModelFormatError : public std::runtime_error {
 public:
  enum class Reason { version, truncated, corrupt };

  ModelFormatError(Reason reason, const std::string& what) : std::runtime_error(what), reason_(reason) {}
  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

// Model file layout (one JSON value per line):
//
//   {"format":"edgeguard-model","format_version":1,"model_kind":...,
//    "params":{...},"rng":...,"vocab":{...},"tree_count":N}
//   then per tree: {"tree":i,"depth":d,"node_count":m}
//                  followed by m nodes in pre-order:
//                  ["split",feature,threshold,count_normal,count_attack]
//                  ["leaf",count_normal,count_attack]
//   {"end":"edgeguard-model","tree_count":N}
//
// An internal node's left child is the next line; its right child starts
// right after the left subtree ends.
void save_model(const Model& model, std::ostream& out);
void save_model(const Model& model, const std::string& path);

// Reads and validates the whole file before returning; throws
// ModelFormatError and never yields a partially built model.
Model load_model(std::istream& in);
Model load_model(const std::string& path);

}  // namespace edgeguard::classifier
