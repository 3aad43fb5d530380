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
#include <span>
#include <string>
#include <string_view>

#include "edgeguard/classifier/forest.hpp"

namespace edgeguard::classifier {

// Attack is the positive class.
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
  // Same outcomes with normal taken as the positive class.
  ConfusionMatrix normal_positive() const noexcept { return {tn, fn, tp, fp}; }
  bool operator==(const ConfusionMatrix&) const = default;
};

struct MetricsReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// precision, recall and f1 are 0 when their denominator is 0.
// Throws std::invalid_argument for an empty matrix.
MetricsReport metrics(const ConfusionMatrix& cm);

void tally(ConfusionMatrix& cm, TrafficClass predicted, TrafficClass actual) noexcept;

// Throws dataset::EmptyDatasetError when `test` is empty.
ConfusionMatrix evaluate(const Model& model, std::span<const EncodedSample> test);

// Single-line machine-readable report, e.g.
// {"tp":1,"fp":0,"tn":1,"fn":0,"accuracy":1,"precision":1,"recall":1,"f1":1}
// Numbers use the shortest representation that round-trips.
std::string format_machine_report(const ConfusionMatrix& cm);
// Parses the counts back; throws std::invalid_argument if the line is not a
// byte-exact report.
ConfusionMatrix parse_machine_report(std::string_view line);

// Aligned table with one row per score and one column per named model.
std::string format_table(std::span<const std::pair<std::string, MetricsReport>> columns);

}  // namespace edgeguard::classifier
