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


#include "edgeguard/cli/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "edgeguard/common/error.hpp"
#include "edgeguard/gateway/lease.hpp"

namespace edgeguard::cli {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw Error(ErrorKind::validation, "config " + key + ": " + why);
}

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) bad(where, "must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, _] : obj.items()) {
    if (!ok.count(k)) bad(where.empty() ? k : where + "." + k, "unknown key");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  const std::string name = where.empty() ? key : where + "." + key;
  try {
    if constexpr (std::is_same_v<T, std::uint32_t> || std::is_same_v<T, std::uint64_t>) {
      if (!it->is_number_unsigned()) bad(name, "must be a non-negative integer");
      const auto v = it->get<std::uint64_t>();
      if (v > std::numeric_limits<T>::max()) bad(name, "out of range");
      out = static_cast<T>(v);
    } else if constexpr (std::is_same_v<T, double>) {
      if (!it->is_number()) bad(name, "must be a number");
      out = it->get<double>();
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) bad(name, "must be true or false");
      out = it->get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!it->is_string()) bad(name, "must be a string");
      out = it->get<std::string>();
    } else {
      out = it->get<T>();
    }
  } catch (const json::exception& e) {
    bad(name, e.what());
  }
}

std::optional<ListenAddress> read_listen(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  if (it->is_null()) return std::nullopt;
  if (!it->is_string()) bad(std::string("listen.") + key, "must be \"host:port\" or null");
  return parse_listen(it->get<std::string>());
}

}  // namespace

ListenAddress parse_listen(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0) bad("listen", "expected host:port, got '" + text + "'");
  ListenAddress a;
  a.host = text.substr(0, colon);
  const std::string port = text.substr(colon + 1);
  const auto [end, ec] = std::from_chars(port.data(), port.data() + port.size(), a.port);
  if (ec != std::errc{} || end != port.data() + port.size() || a.port < 0 || a.port > 65535) {
    bad("listen", "bad port in '" + text + "'");
  }
  return a;
}

classifier::ModelKind parse_model_kind(const std::string& text) {
  if (text == "tree" || text == "decision_tree") return classifier::ModelKind::decision_tree;
  if (text == "forest" || text == "random_forest") return classifier::ModelKind::random_forest;
  throw Error(ErrorKind::validation, "model kind must be 'tree' or 'forest', got '" + text + "'");
}

Config parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::validation, std::string("config is not valid JSON: ") + e.what());
  }
  only_keys(root, "", {"seed", "dataset", "model", "gateway", "otp", "alert", "listen", "audit_log", "portal_dir"});
  Config c;
  read(root, "seed", c.seed, "");
  c.params.seed = c.seed;
  read(root, "audit_log", c.audit_log, "");
  read(root, "portal_dir", c.portal_dir, "");

  if (auto d = root.find("dataset"); d != root.end()) {
    only_keys(*d, "dataset", {"train", "test"});
    read(*d, "train", c.train_path, "dataset");
    read(*d, "test", c.test_path, "dataset");
  }
  if (auto m = root.find("model"); m != root.end()) {
    only_keys(*m, "model", {"kind", "path", "max_depth", "min_samples_split", "min_samples_leaf", "n_trees",
                            "features_per_split", "bootstrap", "threads"});
    std::string kind;
    read(*m, "kind", kind, "model");
    if (!kind.empty()) c.model_kind = parse_model_kind(kind);
    read(*m, "path", c.model_path, "model");
    if (auto md = m->find("max_depth"); md != m->end() && !md->is_null()) {
      std::uint32_t depth = 0;
      read(*m, "max_depth", depth, "model");
      if (depth == 0) bad("model.max_depth", "must be positive or null");
      c.params.max_depth = depth;
    }
    read(*m, "min_samples_split", c.params.min_samples_split, "model");
    read(*m, "min_samples_leaf", c.params.min_samples_leaf, "model");
    read(*m, "n_trees", c.params.n_trees, "model");
    read(*m, "features_per_split", c.params.features_per_split, "model");
    read(*m, "bootstrap", c.params.bootstrap, "model");
    std::uint32_t threads = 0;
    read(*m, "threads", threads, "model");
    c.threads = threads;
  }
  if (auto g = root.find("gateway"); g != root.end()) {
    only_keys(*g, "gateway", {"pool", "lease_seconds", "idle_seconds", "otp_service_url", "policy_file", "phone_salt"});
    if (auto p = g->find("pool"); p != g->end()) {
      only_keys(*p, "gateway.pool", {"cidr", "exclude"});
      read(*p, "cidr", c.pool_cidr, "gateway.pool");
      if (auto ex = p->find("exclude"); ex != p->end()) {
        if (!ex->is_array()) bad("gateway.pool.exclude", "must be a list of addresses or ranges");
        c.pool_exclude.clear();
        for (const auto& e : *ex) {
          if (!e.is_string()) bad("gateway.pool.exclude", "entries must be strings");
          c.pool_exclude.push_back(e.get<std::string>());
        }
      }
    }
    read(*g, "lease_seconds", c.lease_seconds, "gateway");
    read(*g, "idle_seconds", c.idle_seconds, "gateway");
    read(*g, "otp_service_url", c.otp_service_url, "gateway");
    read(*g, "policy_file", c.policy_file, "gateway");
    read(*g, "phone_salt", c.phone_salt, "gateway");
  }
  if (auto o = root.find("otp"); o != root.end()) {
    only_keys(*o, "otp", {"ttl_seconds", "max_attempts", "resend_cooldown_seconds", "dispatcher"});
    std::uint32_t ttl = 300, cooldown = 30;
    read(*o, "ttl_seconds", ttl, "otp");
    read(*o, "resend_cooldown_seconds", cooldown, "otp");
    read(*o, "max_attempts", c.otp.max_attempts, "otp");
    read(*o, "dispatcher", c.sms_dispatcher, "otp");
    c.otp.ttl = std::chrono::seconds(ttl);
    c.otp.resend_cooldown = std::chrono::seconds(cooldown);
  }
  if (auto a = root.find("alert"); a != root.end()) {
    only_keys(*a, "alert", {"window", "threshold", "min_confidence"});
    read(*a, "window", c.alert.window, "alert");
    read(*a, "threshold", c.alert.threshold, "alert");
    read(*a, "min_confidence", c.alert.min_confidence, "alert");
  }
  if (auto l = root.find("listen"); l != root.end()) {
    only_keys(*l, "listen", {"gateway", "otp"});
    if (l->contains("gateway")) c.listen_gateway = read_listen(*l, "gateway");
    c.listen_otp = read_listen(*l, "otp");
  }
  validate(c);
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::validation, "cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const Config& c) {
  if (c.alert.threshold > c.alert.window) {
    bad("alert.threshold", "K=" + std::to_string(c.alert.threshold) + " exceeds window W=" +
                               std::to_string(c.alert.window));
  }
  try {
    c.alert.validate();
  } catch (const Error& e) {
    bad("alert", e.what());
  }
  std::vector<gateway::Ipv4> pool;
  try {
    pool = gateway::pool_addresses(c.pool_cidr, c.pool_exclude);
  } catch (const Error& e) {
    bad("gateway.pool", e.what());
  }
  if (pool.empty()) bad("gateway.pool", "address pool is empty after exclusions");
  if (c.lease_seconds == 0) bad("gateway.lease_seconds", "must be positive");
  if (c.idle_seconds == 0) bad("gateway.idle_seconds", "must be positive");
  if (c.otp.ttl <= Duration::zero()) bad("otp.ttl_seconds", "must be positive");
  if (c.otp.max_attempts == 0) bad("otp.max_attempts", "must be positive");
  try {
    c.params.validate();
  } catch (const std::invalid_argument& e) {
    bad("model", e.what());
  }
  const auto& d = c.sms_dispatcher;
  if (d != "console" && d != "mock" && !(d.rfind("file:", 0) == 0 && d.size() > 5)) {
    bad("otp.dispatcher", "must be 'console', 'mock' or 'file:<path>'");
  }
}

void require_model_file(const Config& c) {
  if (!std::filesystem::is_regular_file(c.model_path)) {
    bad("model.path", "model file not found: " + c.model_path);
  }
}

}  // namespace edgeguard::cli
