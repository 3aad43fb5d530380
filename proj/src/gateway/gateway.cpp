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


#include "edgeguard/gateway/gateway.hpp"

#include <set>

#include "edgeguard/common/crypto.hpp"
#include "edgeguard/common/error.hpp"

namespace edgeguard::gateway {

namespace {

bool is_live(SessionState s) { return s != SessionState::EXPIRED; }

Error expired_error(const Session& s) {
  return Error(ErrorKind::invalid_state, "session " + s.session_id + " has expired");
}

}  // namespace

Gateway::Gateway(GatewayConfig config, std::shared_ptr<auth::OtpClient> otp, std::shared_ptr<LeasePool> leases,
                 std::shared_ptr<audit::PolicyRegistry> policies, std::shared_ptr<audit::AuditLog> log)
    : config_(std::move(config)),
      otp_(std::move(otp)),
      leases_(std::move(leases)),
      policies_(std::move(policies)),
      log_(std::move(log)),
      consents_(*policies_, *log_) {
  if (!otp_ || !leases_ || !policies_ || !log_) throw std::invalid_argument("Gateway: missing component");
  if (config_.idle_timeout <= Duration::zero()) throw Error(ErrorKind::validation, "idle timeout must be positive");
  if (config_.phone_salt.empty()) config_.phone_salt = crypto::random_token();
  policies_->active(config_.policy_id);
}

std::shared_ptr<Gateway::Entry> Gateway::entry(std::string_view session_id) const {
  std::shared_lock lock(registry_mu_);
  auto it = sessions_.find(std::string(session_id));
  if (it == sessions_.end()) throw Error(ErrorKind::not_found, "unknown session");
  return it->second;
}

void Gateway::require(const Session& s, SessionEvent e) {
  if (!next_state(s.state, e)) {
    throw Error(ErrorKind::invalid_state,
                "cannot apply " + std::string(to_string(e)) + " in state " + std::string(to_string(s.state)));
  }
}

void Gateway::transition(Session& s, SessionEvent e) {
  require(s, e);
  s.state = *next_state(s.state, e);
}

bool Gateway::lapse_if_idle(Session& s, Timestamp now) {
  if (!is_live(s.state) || s.state == SessionState::CONSENTED || now - s.last_activity < config_.idle_timeout) {
    return false;
  }
  transition(s, SessionEvent::idle_timeout);
  expire_locked(s, "idle", now);
  return true;
}

audit::Payload Gateway::base_payload(const Session& s) const {
  audit::Payload p = audit::Payload::object();
  p["session_id"] = s.session_id;
  p["device_id"] = s.device_id;
  return p;
}

void Gateway::expire_locked(Session& s, std::string_view reason, Timestamp now) {
  if (s.lease && s.lease->state == LeaseState::active) {
    try {
      s.lease = leases_->release(s.lease->lease_id, now);
    } catch (const Error&) {
      s.lease->state = LeaseState::expired;
    }
    audit::Payload p = base_payload(s);
    p["ip"] = to_string(s.lease->ip);
    p["lease_id"] = s.lease->lease_id;
    p["reason"] = reason;
    log_->append(audit::AuditKind::lease_released, std::move(p), now);
  }
  audit::Payload p = base_payload(s);
  p["reason"] = reason;
  log_->append(audit::AuditKind::session_expired, std::move(p), now);
}

ConnectResult Gateway::on_connect(std::string_view device_id, Timestamp now) {
  if (device_id.empty() || device_id.size() > 128) throw Error(ErrorKind::validation, "device_id must be 1..128 chars");
  std::unique_lock lock(registry_mu_);
  if (auto d = live_by_device_.find(std::string(device_id)); d != live_by_device_.end()) {
    auto e = sessions_.at(d->second);
    std::lock_guard session_lock(e->mu);
    if (!lapse_if_idle(e->session, now) && is_live(e->session.state)) {
      return {e->session, false, config_.portal_path + "?session=" + e->session.session_id};
    }
  }
  auto e = std::make_shared<Entry>();
  Session& s = e->session;
  s.session_id = crypto::random_token();
  s.device_id = std::string(device_id);
  s.created_at = now;
  s.last_activity = now;
  log_->append(audit::AuditKind::session_connected, base_payload(s), now);
  sessions_[s.session_id] = e;
  live_by_device_[s.device_id] = s.session_id;
  return {s, true, config_.portal_path + "?session=" + s.session_id};
}

PhoneResult Gateway::submit_phone(std::string_view session_id, std::string_view phone, Timestamp now) {
  auto e = entry(session_id);
  std::lock_guard lock(e->mu);
  Session& s = e->session;
  lapse_if_idle(s, now);
  require(s, SessionEvent::phone_submitted);

  const auto number = auth::PhoneNumber::parse(phone);
  const std::string hash = audit::hash_phone(config_.phone_salt, number.e164());
  const bool same_phone = s.state == SessionState::PHONE_SUBMITTED && s.phone_hash == hash && s.challenge_id;
  const auth::ChallengeTicket ticket =
      same_phone ? otp_->resend(*s.challenge_id, now) : otp_->request(number.e164(), now);

  transition(s, same_phone ? SessionEvent::code_resent : SessionEvent::phone_submitted);
  s.phone_hash = hash;
  s.challenge_id = ticket.challenge_id;
  s.last_activity = now;
  audit::Payload p = base_payload(s);
  p["phone_hash"] = hash;
  p["expires_at"] = to_epoch_ms(ticket.expires_at);
  p["resend"] = same_phone;
  log_->append(audit::AuditKind::otp_requested, std::move(p), now);
  return {s, ticket};
}

PhoneResult Gateway::resend(std::string_view session_id, Timestamp now) {
  auto e = entry(session_id);
  std::lock_guard lock(e->mu);
  Session& s = e->session;
  lapse_if_idle(s, now);
  require(s, SessionEvent::code_resent);

  const auth::ChallengeTicket ticket = otp_->resend(*s.challenge_id, now);
  transition(s, SessionEvent::code_resent);
  s.challenge_id = ticket.challenge_id;
  s.last_activity = now;
  audit::Payload p = base_payload(s);
  p["phone_hash"] = *s.phone_hash;
  p["expires_at"] = to_epoch_ms(ticket.expires_at);
  p["resend"] = true;
  log_->append(audit::AuditKind::otp_requested, std::move(p), now);
  return {s, ticket};
}

OtpResult Gateway::submit_otp(std::string_view session_id, std::string_view code, Timestamp now) {
  auto e = entry(session_id);
  std::lock_guard lock(e->mu);
  Session& s = e->session;
  lapse_if_idle(s, now);
  require(s, SessionEvent::otp_verified);

  const auth::VerifyOutcome outcome = otp_->verify(*s.challenge_id, code, now);
  s.last_activity = now;
  if (outcome.verified) {
    transition(s, SessionEvent::otp_verified);
    log_->append(audit::AuditKind::otp_verified, base_payload(s), now);
  } else if (outcome.reason == auth::RejectReason::expired || outcome.reason == auth::RejectReason::exhausted) {
    transition(s, SessionEvent::otp_failed);
    expire_locked(s, "otp_" + std::string(auth::to_string(*outcome.reason)), now);
  } else if (outcome.reason == auth::RejectReason::already_used) {
    throw Error(ErrorKind::invalid_state, "challenge was already used");
  }
  return {s, outcome};
}

Session Gateway::accept_policy(std::string_view session_id, const audit::PolicyRef& ref, Timestamp now) {
  auto e = entry(session_id);
  std::lock_guard lock(e->mu);
  Session& s = e->session;
  if (s.consent && (s.state == SessionState::ONLINE || s.state == SessionState::QUARANTINED)) return s;
  lapse_if_idle(s, now);
  require(s, SessionEvent::consent_recorded);
  if (!policies_->is_active(ref)) {
    const auto active = policies_->active(config_.policy_id);
    throw Error(ErrorKind::version_mismatch, "policy " + ref.policy_id + " v" + std::to_string(ref.version) +
                                                 " is not active; display v" + std::to_string(active.version));
  }

  const Lease lease = leases_->allocate(s.device_id, now);
  const SessionState before = s.state;
  try {
    consents_.record_consent(s.session_id, s.phone_hash.value_or(""), ref, now);
    transition(s, SessionEvent::consent_recorded);
    s.consent = ref;

    audit::Payload granted = base_payload(s);
    granted["ip"] = to_string(lease.ip);
    granted["lease_id"] = lease.lease_id;
    granted["expires_at"] = to_epoch_ms(lease.expires_at);
    log_->append(audit::AuditKind::lease_granted, std::move(granted), now);
    transition(s, SessionEvent::lease_granted);
    s.lease = lease;

    audit::Payload online = base_payload(s);
    online["ip"] = to_string(lease.ip);
    online["policy_id"] = ref.policy_id;
    online["version"] = ref.version;
    log_->append(audit::AuditKind::session_online, std::move(online), now);
  } catch (...) {
    s.state = before;
    s.lease.reset();
    try {
      leases_->release(lease.lease_id, now);
    } catch (const Error&) {
    }
    throw;
  }
  s.last_activity = now;
  return s;
}

Session Gateway::quarantine(std::string_view session_id, const audit::Payload& evidence, Timestamp now) {
  auto e = entry(session_id);
  std::lock_guard lock(e->mu);
  Session& s = e->session;
  transition(s, SessionEvent::intrusion_detected);
  if (evidence.contains("reason") && evidence["reason"].is_string()) {
    s.quarantine_reason = evidence["reason"].get<std::string>();
  } else {
    s.quarantine_reason = "intrusion detected";
  }
  audit::Payload p = base_payload(s);
  if (s.lease) p["ip"] = to_string(s.lease->ip);
  p["evidence"] = evidence;
  log_->append(audit::AuditKind::session_quarantined, std::move(p), now);
  return s;
}

void Gateway::record_activity(std::string_view session_id, Timestamp now) {
  auto e = entry(session_id);
  std::lock_guard lock(e->mu);
  Session& s = e->session;
  if (s.state != SessionState::ONLINE && s.state != SessionState::QUARANTINED) {
    throw Error(ErrorKind::not_admitted, "session is " + std::string(to_string(s.state)));
  }
  if (lapse_if_idle(s, now)) throw expired_error(s);
  try {
    s.lease = leases_->renew(s.lease->lease_id, now);
  } catch (const Error&) {
    transition(s, SessionEvent::idle_timeout);
    expire_locked(s, "lease_expired", now);
    throw expired_error(s);
  }
  s.last_activity = now;
}

std::vector<std::string> Gateway::expire_idle(Timestamp now) {
  std::set<std::uint64_t> lapsed;
  for (const Lease& l : leases_->expire(now)) lapsed.insert(l.lease_id);

  std::vector<std::shared_ptr<Entry>> entries;
  {
    std::shared_lock lock(registry_mu_);
    entries.reserve(sessions_.size());
    for (const auto& [_, e] : sessions_) entries.push_back(e);
  }
  std::vector<std::string> expired;
  for (const auto& e : entries) {
    std::lock_guard lock(e->mu);
    Session& s = e->session;
    if (!is_live(s.state) || s.state == SessionState::CONSENTED) continue;
    const bool lease_gone = s.lease && s.lease->state == LeaseState::active && lapsed.count(s.lease->lease_id);
    if (lease_gone) {
      transition(s, SessionEvent::idle_timeout);
      expire_locked(s, "lease_expired", now);
    } else if (!lapse_if_idle(s, now)) {
      continue;
    }
    expired.push_back(s.session_id);
  }
  return expired;
}

Session Gateway::get(std::string_view session_id) const {
  auto e = entry(session_id);
  std::lock_guard lock(e->mu);
  return e->session;
}

std::optional<Session> Gateway::find(std::string_view session_id) const {
  try {
    return get(session_id);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::vector<Session> Gateway::sessions() const {
  std::vector<std::shared_ptr<Entry>> entries;
  {
    std::shared_lock lock(registry_mu_);
    for (const auto& [_, e] : sessions_) entries.push_back(e);
  }
  std::vector<Session> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    std::lock_guard lock(e->mu);
    out.push_back(e->session);
  }
  return out;
}

audit::PolicyDocument Gateway::active_policy() const { return policies_->active(config_.policy_id); }

}  // namespace edgeguard::gateway
