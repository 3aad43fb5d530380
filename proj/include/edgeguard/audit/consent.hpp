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

#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "edgeguard/audit/audit_log.hpp"
#include "edgeguard/audit/policy.hpp"
#include "edgeguard/common/time.hpp"

namespace edgeguard::audit {

// Salted SHA-256 of an E.164 number, hex encoded. The only form in which a
// phone number is written to the audit log.
std::string hash_phone(std::string_view salt, std::string_view e164);

struct ConsentRecord {
  std::string session_id;
  std::string phone_hash;
  PolicyRef policy;
  Timestamp accepted_at;

  bool operator==(const ConsentRecord&) const = default;
};

// Consent is persisted as its consent_granted audit event: the record exists
// once that event is committed, and not before.
class ConsentLedger {
 public:
  ConsentLedger(const PolicyRegistry& policies, AuditLog& log) : policies_(policies), log_(log) {}

  // Idempotent per session: a repeat returns the stored record unchanged.
  // Errors: version_mismatch when `ref` is not the active version of its
  // policy (or its hash differs), storage when the audit append fails.
  ConsentRecord record_consent(std::string_view session_id, std::string_view phone_hash, const PolicyRef& ref,
                               Timestamp now);

  std::optional<ConsentRecord> find(std::string_view session_id) const;

 private:
  const PolicyRegistry& policies_;
  AuditLog& log_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, ConsentRecord> records_;
};

}  // namespace edgeguard::audit
