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
#include <map>
#include <random>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "edgeguard/audit/audit_log.hpp"
#include "edgeguard/audit/policy.hpp"
#include "edgeguard/auth/client.hpp"
#include "edgeguard/auth/dispatcher.hpp"
#include "edgeguard/classifier/model_io.hpp"
#include "edgeguard/cli/commands.hpp"
#include "edgeguard/common/error.hpp"
#include "edgeguard/gateway/gateway.hpp"
#include "edgeguard/monitor/monitor.hpp"

namespace edgeguard::cli {

using json = nlohmann::json;
using dataset::TrafficClass;

namespace {

constexpr std::int64_t kSimulationEpochMs = 1'767'225'600'000;  // 2026-01-01T00:00:00Z

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw Error(ErrorKind::validation, "scenario " + key + ": " + why);
}

TrafficClass parse_traffic(const std::string& text) {
  if (text == "normal") return TrafficClass::normal;
  if (text == "attack") return TrafficClass::attack;
  bad("traffic", "must be 'normal' or 'attack', got '" + text + "'");
}

std::string_view traffic_name(TrafficClass c) { return c == TrafficClass::normal ? "normal" : "attack"; }

// Draws `count` records of class `c` from `pool` with replacement.
std::vector<dataset::ConnectionRecord> sample_class(std::span<const dataset::ConnectionRecord> pool,
                                                    TrafficClass c, std::size_t count, std::mt19937_64& rng) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (!pool[i].label.empty() && dataset::binarize_label(pool[i].label) == c) candidates.push_back(i);
  }
  if (candidates.empty()) {
    throw Error(ErrorKind::validation, "record pool has no " + std::string(traffic_name(c)) + " records");
  }
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  std::vector<dataset::ConnectionRecord> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(pool[candidates[pick(rng)]]);
  return out;
}

json outcome_json(const DeviceOutcome& d) {
  json j = {{"device_id", d.device_id},
            {"traffic", traffic_name(d.traffic)},
            {"admitted", d.admitted},
            {"events", d.events},
            {"attack_verdicts", d.attack_verdicts}};
  j["quarantined_at"] = d.quarantined_at ? json(*d.quarantined_at) : json(nullptr);
  return j;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::validation, std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) bad("(root)", "must be an object");
  Scenario s;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "records") {
        s.records_path = value.get<std::string>();
      } else if (key == "rate") {
        s.rate = value.get<double>();
      } else if (key == "runs") {
        s.runs = value.get<std::uint32_t>();
      } else if (key == "devices") {
        if (!value.is_array()) bad("devices", "must be an array");
        for (const auto& d : value) {
          ScenarioDevice dev;
          for (const auto& [dk, dv] : d.items()) {
            if (dk == "device_id") dev.device_id = dv.get<std::string>();
            else if (dk == "phone") dev.phone = dv.get<std::string>();
            else if (dk == "traffic") dev.traffic = parse_traffic(dv.get<std::string>());
            else if (dk == "count") dev.count = dv.get<std::size_t>();
            else bad("devices." + dk, "unknown key");
          }
          if (dev.device_id.empty()) bad("devices.device_id", "required");
          if (dev.phone.empty()) bad("devices.phone", "required");
          s.devices.push_back(std::move(dev));
        }
      } else {
        bad(key, "unknown key");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::validation, std::string("scenario has a value of the wrong type: ") + e.what());
  }
  if (!(s.rate > 0)) bad("rate", "must be positive");
  if (s.runs == 0) bad("runs", "must be at least 1");
  if (s.devices.empty()) bad("devices", "at least one device is required");
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::validation, "cannot open scenario file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

bool consent_precedes_online(const std::string& audit_bytes) {
  std::unordered_set<std::string> consented;
  std::istringstream in(audit_bytes);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json ev = json::parse(line, nullptr, false);
    if (ev.is_discarded() || !ev.contains("kind") || !ev.contains("payload")) return false;
    const auto& payload = ev["payload"];
    const std::string session = payload.value("session_id", "");
    const std::string kind = ev["kind"].get<std::string>();
    if (kind == audit::to_string(audit::AuditKind::consent_granted)) {
      consented.insert(session);
    } else if (kind == audit::to_string(audit::AuditKind::session_online)) {
      if (!consented.contains(session)) return false;
    }
  }
  return true;
}

ScenarioReport run_scenario(const Config& config, const Scenario& scenario,
                            std::span<const dataset::ConnectionRecord> pool,
                            std::shared_ptr<const classifier::Model> model) {
  const auto policy = audit::load_policy_file(config.policy_file);
  const auto addresses = gateway::pool_addresses(config.pool_cidr, config.pool_exclude);
  ScenarioReport report;

  for (std::uint32_t r = 0; r < scenario.runs; ++r) {
    RunOutcome run;
    run.seed = config.seed + r;
    std::mt19937_64 rng(run.seed);

    auto sink = std::make_unique<audit::MemorySink>();
    audit::MemorySink* sink_view = sink.get();
    auto log = std::make_shared<audit::AuditLog>(std::move(sink));
    auto policies = std::make_shared<audit::PolicyRegistry>();
    policies->publish(policy);
    auto sms = std::make_shared<auth::MockDispatcher>();
    auto otp = std::make_shared<auth::OtpService>(sms, config.otp);
    auto leases = std::make_shared<gateway::LeasePool>(addresses, std::chrono::seconds(config.lease_seconds));
    gateway::GatewayConfig gcfg;
    gcfg.idle_timeout = std::chrono::seconds(config.idle_seconds);
    gcfg.policy_id = policy.policy_id;
    gcfg.phone_salt = config.phone_salt.empty() ? "simulation" : config.phone_salt;
    gateway::Gateway gw(gcfg, std::make_shared<auth::LocalOtpClient>(otp), leases, policies, log);
    monitor::Monitor mon(model, config.alert, gw, *log);

    const Timestamp t0 = from_epoch_ms(kSimulationEpochMs);
    for (const auto& dev : scenario.devices) {
      DeviceOutcome outcome;
      outcome.device_id = dev.device_id;
      outcome.traffic = dev.traffic;
      const auto records = sample_class(pool, dev.traffic, dev.count, rng);
      try {
        const auto sid = gw.on_connect(dev.device_id, t0).session.session_id;
        gw.submit_phone(sid, dev.phone, t0);
        const auto code = sms->last_code(dev.phone);
        if (!code) throw Error(ErrorKind::delivery, "no code delivered to " + dev.phone);
        gw.submit_otp(sid, *code, t0);
        gw.accept_policy(sid, audit::ref_of(gw.active_policy()), t0);
        outcome.admitted = true;

        const auto traffic = monitor::simulate_traffic(records, sid, scenario.rate, rng(), t0 + std::chrono::seconds(1), gw);
        const auto replayed = monitor::replay(mon, traffic);
        outcome.events = replayed.events;
        outcome.attack_verdicts = replayed.attack_verdicts;
        outcome.quarantined_at = replayed.quarantined_at;
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::validation) throw;
      }
      run.devices.push_back(std::move(outcome));
    }

    const std::string bytes = sink_view->read_all();
    run.audit_chain_ok = audit::verify_chain(bytes).ok;
    run.consent_before_online = consent_precedes_online(bytes);
    run.audit_events = log->size();
    report.runs.push_back(std::move(run));
    if (r + 1 == scenario.runs) report.audit_bytes = bytes;
    for (const auto& m : sms->outbox()) report.sms_bodies.push_back(m.body);
  }
  return report;
}

int cmd_simulate(const Config& config, const std::string& scenario_path, std::ostream& out) {
  const Scenario scenario = load_scenario(scenario_path);
  const std::string records_path = scenario.records_path.empty() ? config.test_path : scenario.records_path;
  if (records_path.empty()) {
    throw Error(ErrorKind::validation, "scenario records: no record file given and config dataset.test is empty");
  }
  require_model_file(config);
  std::vector<dataset::ConnectionRecord> pool;
  try {
    pool = dataset::load_nslkdd(records_path);
  } catch (const dataset::ParseError&) {
    throw;
  } catch (const std::runtime_error& e) {
    throw Error(ErrorKind::validation, e.what());
  }
  auto model = std::make_shared<const classifier::Model>(classifier::load_model(config.model_path));
  const ScenarioReport report = run_scenario(config, scenario, pool, model);

  json runs = json::array();
  std::map<std::string, std::size_t> quarantined;
  for (const auto& run : report.runs) {
    json devices = json::array();
    for (const auto& d : run.devices) {
      devices.push_back(outcome_json(d));
      if (d.quarantined_at) ++quarantined[d.device_id];
    }
    runs.push_back({{"seed", run.seed},
                    {"audit_chain_ok", run.audit_chain_ok},
                    {"consent_before_online", run.consent_before_online},
                    {"audit_events", run.audit_events},
                    {"devices", devices}});
  }
  json summary = json::object();
  for (const auto& dev : scenario.devices) {
    summary[dev.device_id] = {{"traffic", traffic_name(dev.traffic)},
                              {"quarantined_runs", quarantined[dev.device_id]},
                              {"runs", report.runs.size()}};
  }
  out << json{{"runs", runs}, {"summary", summary}}.dump(2) << '\n';
  return kExitOk;
}

}  // namespace edgeguard::cli
