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


#include "edgeguard/cli/commands.hpp"

#include <chrono>
#include <iomanip>

#include "edgeguard/audit/audit_log.hpp"
#include "edgeguard/classifier/metrics.hpp"
#include "edgeguard/classifier/model_io.hpp"
#include "edgeguard/common/error.hpp"

namespace edgeguard::cli {

using dataset::TrafficClass;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<dataset::ConnectionRecord> load_records(const std::string& path, const char* what) {
  if (path.empty()) throw Error(ErrorKind::validation, std::string("no ") + what + " dataset path configured");
  return dataset::load_nslkdd(path);
}

}  // namespace

int exit_code_for(const std::exception& e) noexcept {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    return err->kind() == ErrorKind::validation || err->kind() == ErrorKind::version_mismatch ? kExitValidation
                                                                                                : kExitRuntime;
  }
  if (dynamic_cast<const dataset::ParseError*>(&e) || dynamic_cast<const dataset::EmptyDatasetError*>(&e) ||
      dynamic_cast<const std::invalid_argument*>(&e)) {
    return kExitValidation;
  }
  return kExitRuntime;
}

int cmd_train(const Config& config, std::ostream& out) {
  const auto records = load_records(config.train_path, "training");
  const auto start = std::chrono::steady_clock::now();
  const classifier::Model model = classifier::train(config.model_kind, records, config.params, config.threads);
  const double wall = seconds_since(start);
  classifier::save_model(model, config.model_path);

  std::size_t attacks = 0;
  for (const auto& r : records) attacks += dataset::binarize_label(r.label) == TrafficClass::attack;
  out << "training records: " << records.size() << " (normal " << records.size() - attacks << ", attack " << attacks
      << ")\n";
  out << "model: " << classifier::to_string(config.model_kind) << '\n';
  if (const auto* dt = std::get_if<classifier::DecisionTreeModel>(&model)) {
    out << "depth: " << dt->tree.depth() << "\nnodes: " << dt->tree.nodes().size()
        << "\nleaves: " << dt->tree.leaf_count() << '\n';
  } else {
    const auto& rf = std::get<classifier::RandomForestModel>(model);
    std::size_t max_depth = 0;
    for (const auto& t : rf.trees) max_depth = std::max(max_depth, t.depth());
    out << "trees: " << rf.trees.size() << "\nmax tree depth: " << max_depth << '\n';
  }
  out << "seed: " << config.params.seed << '\n';
  out << "wall time: " << std::fixed << std::setprecision(2) << wall << " s\n";
  out << "model file: " << config.model_path << '\n';
  out.unsetf(std::ios::floatfield);
  return kExitOk;
}

int cmd_evaluate(const Config& config, std::ostream& out) {
  require_model_file(config);
  const auto model = classifier::load_model(config.model_path);
  const auto records = load_records(config.test_path, "test");
  if (records.empty()) throw dataset::EmptyDatasetError("test set " + config.test_path + " is empty");
  const auto samples = dataset::encode_all(records, classifier::vocabulary(model));
  const auto cm = classifier::evaluate(model, samples);
  const std::string name = std::string(classifier::to_string(classifier::kind_of(model)));

  out << classifier::format_machine_report(cm) << '\n';
  out << "\nconfusion matrix (positive = attack): tp=" << cm.tp << " fp=" << cm.fp << " tn=" << cm.tn
      << " fn=" << cm.fn << "\n\n";
  const std::vector<std::pair<std::string, classifier::MetricsReport>> attack_view{{name, classifier::metrics(cm)}};
  out << classifier::format_table(attack_view);
  const auto np = cm.normal_positive();
  out << "\nconfusion matrix (positive = normal): tp=" << np.tp << " fp=" << np.fp << " tn=" << np.tn
      << " fn=" << np.fn << "\n\n";
  const std::vector<std::pair<std::string, classifier::MetricsReport>> normal_view{{name, classifier::metrics(np)}};
  out << classifier::format_table(normal_view);
  return kExitOk;
}

int cmd_audit_verify(const std::string& path, std::ostream& out) {
  const auto v = audit::verify_chain_file(path);
  if (v.ok) {
    out << "ok: " << v.events << " events verified\n";
    return kExitOk;
  }
  out << "tampered: first bad event " << *v.first_bad << " (" << v.events << " events verified before it)\n";
  return kExitValidation;
}

}  // namespace edgeguard::cli
