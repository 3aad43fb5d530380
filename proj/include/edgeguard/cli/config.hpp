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
#include <optional>
#include <string>
#include <vector>

#include "edgeguard/auth/otp.hpp"
#include "edgeguard/classifier/forest.hpp"
#include "edgeguard/monitor/monitor.hpp"

namespace edgeguard::cli {

struct ListenAddress {
  std::string host = "127.0.0.1";
  int port = 0;
};

// Parses "host:port". Throws Error(validation).
ListenAddress parse_listen(const std::string& text);

struct Config {
  std::uint64_t seed = 42;

  std::string train_path;
  std::string test_path;

  classifier::ModelKind model_kind = classifier::ModelKind::decision_tree;
  std::string model_path = "edgeguard.model";
  classifier::TrainParams params;
  unsigned threads = 0;

  std::string pool_cidr = "10.0.0.0/24";
  std::vector<std::string> pool_exclude{"10.0.0.1"};
  std::uint32_t lease_seconds = 3600;
  std::uint32_t idle_seconds = 1800;
  std::string otp_service_url;  // empty: in-process OTP service
  std::string policy_file = "config/policy/network-use-v1.json";
  std::string phone_salt;  // empty: random per process

  auth::OtpPolicy otp;
  std::string sms_dispatcher = "console";  // console | mock | file:<path>

  monitor::AlertPolicy alert;

  std::optional<ListenAddress> listen_gateway = ListenAddress{"127.0.0.1", 8080};
  std::optional<ListenAddress> listen_otp;
  std::string audit_log = "edgeguard-audit.log";
  std::string portal_dir;
};

// Reads a JSON config file. Unknown keys are rejected; missing keys keep
// their defaults. Throws Error(validation) with a message naming the key.
Config load_config(const std::string& path);
Config parse_config(const std::string& json_text);

// Range and consistency checks shared by every command: alert K <= W, a
// non-empty address pool, positive durations, valid train params.
void validate(const Config& config);
// Throws Error(validation) if config.model_path does not name a file.
void require_model_file(const Config& config);

classifier::ModelKind parse_model_kind(const std::string& text);

}  // namespace edgeguard::cli
