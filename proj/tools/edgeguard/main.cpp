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


#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "edgeguard/cli/commands.hpp"
#include "edgeguard/cli/config.hpp"
#include "edgeguard/common/error.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string model;
  std::string out;
  std::string kind;
  std::string train;
  std::string test;
};

edgeguard::cli::Config resolve(const Overrides& o) {
  using namespace edgeguard::cli;
  Config c = o.config_path.empty() ? Config{} : load_config(o.config_path);
  if (o.seed) {
    c.seed = *o.seed;
    c.params.seed = *o.seed;
  }
  if (!o.model.empty()) c.model_path = o.model;
  if (!o.kind.empty()) c.model_kind = parse_model_kind(o.kind);
  if (!o.train.empty()) c.train_path = o.train;
  if (!o.test.empty()) c.test_path = o.test;
  validate(c);
  return c;
}

template <typename Fn>
int with_output(const std::string& path, Fn fn) {
  if (path.empty()) return fn(std::cout);
  std::ofstream file(path);
  if (!file) throw edgeguard::Error(edgeguard::ErrorKind::validation, "cannot open output file " + path);
  return fn(file);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace edgeguard::cli;
  CLI::App app{"EdgeGuard captive-portal gateway with traffic classification"};
  app.require_subcommand(1);

  Overrides o;
  app.add_option("--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "seed for training and simulation");
  app.add_option("--model", o.model, "model file to write (train) or read");
  app.add_option("--out", o.out, "write the command's report to this file instead of stdout");
  app.add_option("--kind", o.kind, "model kind: tree or forest");
  app.add_option("--train", o.train, "labeled training file");
  app.add_option("--test", o.test, "labeled test file");

  auto* train = app.add_subcommand("train", "train a classifier and save it");
  auto* evaluate = app.add_subcommand("evaluate", "score a saved model on the test file");
  auto* serve = app.add_subcommand("serve", "run the OTP service, gateway API and monitor");
  auto* simulate = app.add_subcommand("simulate", "drive scripted devices through the portal and replay traffic");
  std::string scenario_path;
  simulate->add_option("scenario", scenario_path, "scenario JSON file")->required();
  auto* audit = app.add_subcommand("audit", "audit log tools");
  audit->require_subcommand(1);
  auto* verify = audit->add_subcommand("verify", "verify the hash chain of an audit log");
  std::string audit_path;
  verify->add_option("path", audit_path, "audit log file")->required();
  for (auto* sub : {train, evaluate, serve, simulate, audit, verify}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*verify) return with_output(o.out, [&](std::ostream& out) { return cmd_audit_verify(audit_path, out); });
    const Config config = resolve(o);
    if (*train) return with_output(o.out, [&](std::ostream& out) { return cmd_train(config, out); });
    if (*evaluate) return with_output(o.out, [&](std::ostream& out) { return cmd_evaluate(config, out); });
    if (*simulate) {
      return with_output(o.out, [&](std::ostream& out) { return cmd_simulate(config, scenario_path, out); });
    }
    if (*serve) return cmd_serve(config, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kExitValidation;
}
