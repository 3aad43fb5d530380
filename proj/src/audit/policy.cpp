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


#include "edgeguard/audit/policy.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "edgeguard/common/crypto.hpp"
#include "edgeguard/common/error.hpp"

namespace edgeguard::audit {

PolicyDocument make_policy(std::string policy_id, std::uint32_t version, std::string title, std::string text) {
  PolicyDocument doc{std::move(policy_id), version, std::move(title), std::move(text), {}};
  doc.content_hash = crypto::sha256_hex(doc.text);
  return doc;
}

PolicyRef ref_of(const PolicyDocument& doc) { return {doc.policy_id, doc.version, doc.content_hash}; }

PolicyDocument parse_policy(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::validation, std::string("policy is not valid JSON: ") + e.what());
  }
  try {
    const auto version = j.at("version").get<std::int64_t>();
    if (version < 1 || version > UINT32_MAX) throw Error(ErrorKind::validation, "policy version must be positive");
    PolicyDocument doc = make_policy(j.at("policy_id").get<std::string>(), static_cast<std::uint32_t>(version),
                                     j.value("title", std::string{}), j.at("text").get<std::string>());
    if (doc.policy_id.empty()) throw Error(ErrorKind::validation, "policy_id is empty");
    if (j.contains("content_hash") && j["content_hash"].get<std::string>() != doc.content_hash) {
      throw Error(ErrorKind::validation, "policy content_hash does not match its text");
    }
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::validation, std::string("policy document: ") + e.what());
  }
}

PolicyDocument load_policy_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::validation, "cannot open policy file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_policy(ss.str());
}

void PolicyRegistry::publish(PolicyDocument doc) {
  if (doc.policy_id.empty()) throw Error(ErrorKind::validation, "policy_id is empty");
  if (crypto::sha256_hex(doc.text) != doc.content_hash) {
    throw Error(ErrorKind::validation, "policy content_hash does not match its text");
  }
  std::lock_guard lock(mu_);
  auto& versions = docs_[doc.policy_id];
  if (!versions.empty() && doc.version <= versions.back().version) {
    throw Error(ErrorKind::validation, "policy " + doc.policy_id + " version " + std::to_string(doc.version) +
                                           " does not follow " + std::to_string(versions.back().version));
  }
  versions.push_back(std::move(doc));
}

PolicyDocument PolicyRegistry::active(std::string_view policy_id) const {
  std::lock_guard lock(mu_);
  auto it = docs_.find(policy_id);
  if (it == docs_.end()) throw Error(ErrorKind::not_found, "no policy " + std::string(policy_id));
  return it->second.back();
}

std::optional<PolicyDocument> PolicyRegistry::find(std::string_view policy_id, std::uint32_t version) const {
  std::lock_guard lock(mu_);
  auto it = docs_.find(policy_id);
  if (it == docs_.end()) return std::nullopt;
  for (const auto& d : it->second) {
    if (d.version == version) return d;
  }
  return std::nullopt;
}

bool PolicyRegistry::is_active(const PolicyRef& ref) const {
  std::lock_guard lock(mu_);
  auto it = docs_.find(ref.policy_id);
  return it != docs_.end() && ref_of(it->second.back()) == ref;
}

}  // namespace edgeguard::audit
