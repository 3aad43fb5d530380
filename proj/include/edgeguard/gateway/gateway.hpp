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

#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "edgeguard/audit/audit_log.hpp"
#include "edgeguard/audit/consent.hpp"
#include "edgeguard/audit/policy.hpp"
#include "edgeguard/auth/client.hpp"
#include "edgeguard/gateway/lease.hpp"
#include "edgeguard/gateway/state.hpp"

namespace edgeguard::gateway {

struct Session {
  std::string session_id;
  std::string device_id;
  SessionState state = SessionState::NEW;
  std::optional<std::string> phone_hash;
  std::optional<std::string> challenge_id;
  std::optional<audit::PolicyRef> consent;
  std::optional<Lease> lease;
  std::optional<std::string> quarantine_reason;
  Timestamp created_at;
  Timestamp last_activity;
};

struct GatewayConfig {
  Duration idle_timeout = 1800s;
  std::string policy_id = "network-use";
  std::string phone_salt;
  std::string portal_path = "/portal/";
};

struct ConnectResult {
  Session session;
  bool created = false;
  std::string redirect;  // captive-portal start screen for this session
};

struct PhoneResult {
  Session session;
  auth::ChallengeTicket challenge;
};

struct OtpResult {
  Session session;
  auth::VerifyOutcome outcome;
};

// Session registry and admission state machine. Calls on one session are
// serialized; calls on different sessions proceed independently. Every
// state change goes through next_state(); an illegal one throws
// Error(invalid_state).
class Gateway {
 public:
  Gateway(GatewayConfig config, std::shared_ptr<auth::OtpClient> otp, std::shared_ptr<LeasePool> leases,
          std::shared_ptr<audit::PolicyRegistry> policies, std::shared_ptr<audit::AuditLog> log);

  // Returns the device's live session if it has one, otherwise a new NEW
  // session.
  ConnectResult on_connect(std::string_view device_id, Timestamp now);

  // NEW or PHONE_SUBMITTED. The same phone again resends the current
  // challenge; a new phone requests a fresh one.
  PhoneResult submit_phone(std::string_view session_id, std::string_view phone, Timestamp now);
  PhoneResult resend(std::string_view session_id, Timestamp now);
  // Verified moves to OTP_VERIFIED; exhausted or expired moves to EXPIRED;
  // a wrong code leaves the state alone. The outcome is returned as is.
  OtpResult submit_otp(std::string_view session_id, std::string_view code, Timestamp now);

  // OTP_VERIFIED -> CONSENTED -> ONLINE. Replays on a session that already
  // consented return it unchanged. Errors: version_mismatch, pool_exhausted
  // (state stays OTP_VERIFIED), invalid_state.
  Session accept_policy(std::string_view session_id, const audit::PolicyRef& ref, Timestamp now);

  // ONLINE -> QUARANTINED. `evidence` goes into the audit event.
  Session quarantine(std::string_view session_id, const audit::Payload& evidence, Timestamp now);

  // Traffic seen for an admitted session: bumps last_activity and renews
  // the lease.
  void record_activity(std::string_view session_id, Timestamp now);

  // Sessions idle for idle_timeout or whose lease ran out become EXPIRED;
  // their leases are released. Returns the ids that expired.
  std::vector<std::string> expire_idle(Timestamp now);

  Session get(std::string_view session_id) const;
  std::optional<Session> find(std::string_view session_id) const;
  std::vector<Session> sessions() const;

  audit::PolicyDocument active_policy() const;
  const audit::ConsentLedger& consents() const noexcept { return consents_; }
  const GatewayConfig& config() const noexcept { return config_; }

 private:
  struct Entry {
    std::mutex mu;
    Session session;
  };

  std::shared_ptr<Entry> entry(std::string_view session_id) const;
  static void require(const Session& s, SessionEvent e);
  static void transition(Session& s, SessionEvent e);
  bool lapse_if_idle(Session& s, Timestamp now);
  void expire_locked(Session& s, std::string_view reason, Timestamp now);
  audit::Payload base_payload(const Session& s) const;

  GatewayConfig config_;
  std::shared_ptr<auth::OtpClient> otp_;
  std::shared_ptr<LeasePool> leases_;
  std::shared_ptr<audit::PolicyRegistry> policies_;
  std::shared_ptr<audit::AuditLog> log_;
  audit::ConsentLedger consents_;

  mutable std::shared_mutex registry_mu_;
  std::unordered_map<std::string, std::shared_ptr<Entry>> sessions_;
  std::unordered_map<std::string, std::string> live_by_device_;
};

}  // namespace edgeguard::gateway
