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
#include <exception>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "edgeguard/cli/config.hpp"
#include "edgeguard/classifier/forest.hpp"
#include "edgeguard/dataset/nslkdd.hpp"

namespace edgeguard::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

// Maps an exception escaping a command to its process exit code.
int exit_code_for(const std::exception& e) noexcept;

// Trains on config.train_path and writes config.model_path.
int cmd_train(const Config& config, std::ostream& out);

// Prints the machine-readable confusion line, then a table of metrics with
// attack as the positive class and a second table with normal as positive.
int cmd_evaluate(const Config& config, std::ostream& out);

// Serves until SIGINT or SIGTERM.
int cmd_serve(const Config& config, std::ostream& out);

// Returns kExitOk when the chain verifies and kExitValidation otherwise.
int cmd_audit_verify(const std::string& path, std::ostream& out);

struct ScenarioDevice {
  std::string device_id;
  std::string phone;
  dataset::TrafficClass traffic = dataset::TrafficClass::normal;
  std::size_t count = 100;
};

struct Scenario {
  std::string records_path;  // labeled NSL-KDD file; empty means config.test_path
  double rate = 50.0;        // events per second of simulated time
  std::uint32_t runs = 1;
  std::vector<ScenarioDevice> devices;
};

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

struct DeviceOutcome {
  std::string device_id;
  dataset::TrafficClass traffic = dataset::TrafficClass::normal;
  std::size_t events = 0;
  std::size_t attack_verdicts = 0;
  std::optional<std::size_t> quarantined_at;
  bool admitted = false;
};

struct RunOutcome {
  std::uint64_t seed = 0;
  std::vector<DeviceOutcome> devices;
  bool audit_chain_ok = false;
  bool consent_before_online = false;
  std::uint64_t audit_events = 0;
};

struct ScenarioReport {
  std::vector<RunOutcome> runs;
  std::string audit_bytes;  // audit log of the last run
  std::vector<std::string> sms_bodies;  // every message the mock dispatcher sent
};

// Drives each device through connect, phone, OTP (code read back from the
// mock SMS outbox) and consent, then replays `count` records of its traffic
// class drawn from `pool`. Run r uses seed config.seed + r. Runs entirely
// on in-memory components and a simulated clock.
ScenarioReport run_scenario(const Config& config, const Scenario& scenario,
                            std::span<const dataset::ConnectionRecord> pool,
                            std::shared_ptr<const classifier::Model> model);

// Replays an audit log and checks that every session_online event is
// preceded by a consent_granted event for the same session.
bool consent_precedes_online(const std::string& audit_bytes);

int cmd_simulate(const Config& config, const std::string& scenario_path, std::ostream& out);

}  // namespace edgeguard::cli
