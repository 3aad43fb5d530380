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


#include "edgeguard/classifier/metrics.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace edgeguard::classifier {

namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void append_double(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

MetricsReport metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw std::invalid_argument("metrics: empty confusion matrix");
  MetricsReport r;
  r.accuracy = ratio(cm.tp + cm.tn, cm.total());
  r.precision = ratio(cm.tp, cm.tp + cm.fp);
  r.recall = ratio(cm.tp, cm.tp + cm.fn);
  r.f1 = (r.precision + r.recall) == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

void tally(ConfusionMatrix& cm, TrafficClass predicted, TrafficClass actual) noexcept {
  const bool p = predicted == TrafficClass::attack;
  const bool a = actual == TrafficClass::attack;
  if (p && a) ++cm.tp;
  else if (p) ++cm.fp;
  else if (a) ++cm.fn;
  else ++cm.tn;
}

ConfusionMatrix evaluate(const Model& model, std::span<const EncodedSample> test) {
  if (test.empty()) throw dataset::EmptyDatasetError("evaluate: empty test set");
  ConfusionMatrix cm;
  for (const auto& s : test) tally(cm, predict(model, s.features).label, s.label);
  return cm;
}

std::string format_machine_report(const ConfusionMatrix& cm) {
  const MetricsReport m = metrics(cm);
  std::string out = "{\"tp\":" + std::to_string(cm.tp) + ",\"fp\":" + std::to_string(cm.fp) +
                    ",\"tn\":" + std::to_string(cm.tn) + ",\"fn\":" + std::to_string(cm.fn);
  out += ",\"accuracy\":";
  append_double(out, m.accuracy);
  out += ",\"precision\":";
  append_double(out, m.precision);
  out += ",\"recall\":";
  append_double(out, m.recall);
  out += ",\"f1\":";
  append_double(out, m.f1);
  out += "}";
  return out;
}

ConfusionMatrix parse_machine_report(std::string_view line) {
  ConfusionMatrix cm;
  try {
    const auto j = nlohmann::json::parse(line);
    cm.tp = j.at("tp").get<std::uint64_t>();
    cm.fp = j.at("fp").get<std::uint64_t>();
    cm.tn = j.at("tn").get<std::uint64_t>();
    cm.fn = j.at("fn").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("machine report: ") + e.what());
  }
  if (format_machine_report(cm) != line) {
    throw std::invalid_argument("machine report: not in canonical form");
  }
  return cm;
}

std::string format_table(std::span<const std::pair<std::string, MetricsReport>> columns) {
  constexpr int kLabelWidth = 10;
  std::string out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-*s", kLabelWidth, "Scores");
  out += buf;
  for (const auto& [name, _] : columns) {
    std::snprintf(buf, sizeof buf, " | %14s", name.c_str());
    out += buf;
  }
  out += "\n";
  out += std::string(kLabelWidth, '-');
  for (std::size_t i = 0; i < columns.size(); ++i) out += "-+-" + std::string(14, '-');
  out += "\n";

  auto row = [&](const char* label, double MetricsReport::*field) {
    std::snprintf(buf, sizeof buf, "%-*s", kLabelWidth, label);
    out += buf;
    for (const auto& [_, report] : columns) {
      std::snprintf(buf, sizeof buf, " | %13.2f%%", 100.0 * (report.*field));
      out += buf;
    }
    out += "\n";
  };
  row("Accuracy", &MetricsReport::accuracy);
  row("Precision", &MetricsReport::precision);
  row("Recall", &MetricsReport::recall);
  row("F1 Score", &MetricsReport::f1);
  return out;
}

}  // namespace edgeguard::classifier
