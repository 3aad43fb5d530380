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


#include "edgeguard/audit/consent.hpp"

#include "edgeguard/common/crypto.hpp"
#include "edgeguard/common/error.hpp"

namespace edgeguard::audit {

std::string hash_phone(std::string_view salt, std::string_view e164) {
  std::string material(salt);
  material.push_back('\0');
  material.append(e164);
  return crypto::sha256_hex(material);
}

ConsentRecord ConsentLedger::record_consent(std::string_view session_id, std::string_view phone_hash,
                                            const PolicyRef& ref, Timestamp now) {
  std::lock_guard lock(mu_);
  if (auto it = records_.find(std::string(session_id)); it != records_.end()) return it->second;

  if (!policies_.is_active(ref)) {
    std::string message = "policy " + ref.policy_id + " v" + std::to_string(ref.version) + " is not the active version";
    try {
      const auto current = policies_.active(ref.policy_id);
      message += " (active is v" + std::to_string(current.version) + ")";
    } catch (const Error&) {
    }
    throw Error(ErrorKind::version_mismatch, message);
  }

  ConsentRecord rec{std::string(session_id), std::string(phone_hash), ref, now};
  Payload payload = Payload::object();
  payload["session_id"] = rec.session_id;
  payload["phone_hash"] = rec.phone_hash;
  payload["policy_id"] = ref.policy_id;
  payload["version"] = ref.version;
  payload["content_hash"] = ref.content_hash;
  log_.append(AuditKind::consent_granted, std::move(payload), now);
  records_.emplace(rec.session_id, rec);
  return rec;
}

std::optional<ConsentRecord> ConsentLedger::find(std::string_view session_id) const {
  std::lock_guard lock(mu_);
  auto it = records_.find(std::string(session_id));
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

}  // namespace edgeguard::audit
