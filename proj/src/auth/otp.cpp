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


#include "edgeguard/auth/otp.hpp"

#include "edgeguard/auth/client.hpp"

#include <cstdio>
#include <mutex>

#include "edgeguard/common/crypto.hpp"
#include "edgeguard/common/error.hpp"

namespace edgeguard::auth {

namespace {

std::string hash_code(const std::string& salt, std::string_view code) {
  return crypto::sha256_hex(salt + std::string(code));
}

bool is_code_shaped(std::string_view code) {
  if (code.size() != kCodeDigits) return false;
  for (char c : code) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(ChallengeState s) noexcept {
  switch (s) {
    case ChallengeState::pending: return "pending";
    case ChallengeState::verified: return "verified";
    case ChallengeState::expired: return "expired";
    case ChallengeState::exhausted: return "exhausted";
  }
  return "unknown";
}

std::string_view to_string(RejectReason r) noexcept {
  switch (r) {
    case RejectReason::invalid_code: return "invalid_code";
    case RejectReason::expired: return "expired";
    case RejectReason::exhausted: return "exhausted";
    case RejectReason::already_used: return "already_used";
  }
  return "unknown";
}

bool is_e164(std::string_view text) noexcept {
  if (text.size() < 9 || text.size() > 16 || text.front() != '+') return false;
  for (char c : text.substr(1)) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

PhoneNumber PhoneNumber::parse(std::string_view text) {
  if (!is_e164(text)) {
    throw Error(ErrorKind::validation, "phone number must be '+' followed by 8 to 15 digits");
  }
  return PhoneNumber(std::string(text));
}

ChallengeTicket ticket_of(const OtpChallenge& challenge) {
  return {challenge.challenge_id, challenge.expires_at, challenge.resend_available_at};
}

std::string generate_code() {
  char buf[kCodeDigits + 1];
  std::snprintf(buf, sizeof buf, "%06u", crypto::random_below(1'000'000));
  return std::string(buf, kCodeDigits);
}

OtpService::OtpService(std::shared_ptr<SmsDispatcher> dispatcher, OtpPolicy policy)
    : dispatcher_(std::move(dispatcher)), policy_(policy) {
  if (!dispatcher_) throw std::invalid_argument("OtpService: dispatcher required");
  if (policy_.max_attempts == 0) throw std::invalid_argument("OtpService: max_attempts must be positive");
  if (policy_.ttl <= Duration::zero()) throw std::invalid_argument("OtpService: ttl must be positive");
}

void OtpService::refresh(Record& rec, Timestamp now) {
  if (rec.view.state == ChallengeState::pending && now >= rec.view.expires_at) {
    rec.view.state = ChallengeState::expired;
    auto it = pending_by_phone_.find(rec.view.phone.e164());
    if (it != pending_by_phone_.end() && it->second == rec.view.challenge_id) pending_by_phone_.erase(it);
  }
}

void OtpService::forget(const std::string& challenge_id) {
  auto it = challenges_.find(challenge_id);
  if (it == challenges_.end()) return;
  auto p = pending_by_phone_.find(it->second.view.phone.e164());
  if (p != pending_by_phone_.end() && p->second == challenge_id) pending_by_phone_.erase(p);
  challenges_.erase(it);
}

OtpChallenge OtpService::issue(const PhoneNumber& phone, Timestamp now) {
  Record rec;
  rec.view.challenge_id = crypto::random_token();
  rec.view.phone = phone;
  rec.view.created_at = now;
  rec.view.expires_at = now + policy_.ttl;
  rec.view.resend_available_at = now + policy_.resend_cooldown;
  rec.view.attempts_remaining = policy_.max_attempts;
  rec.salt = crypto::random_token();

  const std::string code = generate_code();
  rec.code_hash = hash_code(rec.salt, code);
  const auto minutes = std::chrono::duration_cast<std::chrono::minutes>(policy_.ttl).count();
  const std::string message = "Your EdgeGuard verification code is " + code + ". It expires in " +
                              std::to_string(minutes) + " min.";
  DeliveryResult result;
  try {
    result = dispatcher_->send(phone, message);
  } catch (const std::exception& e) {
    result = {false, e.what()};
  }
  if (!result.delivered) {
    throw Error(ErrorKind::delivery, "code delivery failed: " + result.detail);
  }

  OtpChallenge view = rec.view;
  pending_by_phone_[phone.e164()] = view.challenge_id;
  challenges_.emplace(view.challenge_id, std::move(rec));
  return view;
}

OtpChallenge OtpService::request(std::string_view phone_text, Timestamp now) {
  const PhoneNumber phone = PhoneNumber::parse(phone_text);
  std::lock_guard lock(mu_);
  if (auto p = pending_by_phone_.find(phone.e164()); p != pending_by_phone_.end()) {
    const std::string existing = p->second;
    Record& rec = challenges_.at(existing);
    refresh(rec, now);
    if (rec.view.state == ChallengeState::pending && now < rec.view.resend_available_at) {
      throw Error(ErrorKind::rate_limited, "a code was sent recently; retry later", rec.view.resend_available_at);
    }
    if (rec.view.state == ChallengeState::pending) forget(existing);
  }
  return issue(phone, now);
}

VerifyOutcome OtpService::verify(std::string_view challenge_id, std::string_view code, Timestamp now) {
  std::lock_guard lock(mu_);
  auto it = challenges_.find(std::string(challenge_id));
  if (it == challenges_.end()) throw Error(ErrorKind::not_found, "unknown challenge");
  Record& rec = it->second;
  if (!is_code_shaped(code)) throw Error(ErrorKind::validation, "code must be 6 digits");
  refresh(rec, now);

  VerifyOutcome out;
  switch (rec.view.state) {
    case ChallengeState::verified: out.reason = RejectReason::already_used; return out;
    case ChallengeState::exhausted: out.reason = RejectReason::exhausted; return out;
    case ChallengeState::expired:
      out.reason = RejectReason::expired;
      out.attempts_remaining = rec.view.attempts_remaining;
      return out;
    case ChallengeState::pending: break;
  }

  if (crypto::constant_time_equal(hash_code(rec.salt, code), rec.code_hash)) {
    rec.view.state = ChallengeState::verified;
    pending_by_phone_.erase(rec.view.phone.e164());
    out.verified = true;
    out.attempts_remaining = rec.view.attempts_remaining;
    return out;
  }
  --rec.view.attempts_remaining;
  out.attempts_remaining = rec.view.attempts_remaining;
  if (rec.view.attempts_remaining == 0) {
    rec.view.state = ChallengeState::exhausted;
    pending_by_phone_.erase(rec.view.phone.e164());
    out.reason = RejectReason::exhausted;
  } else {
    out.reason = RejectReason::invalid_code;
  }
  return out;
}

OtpChallenge OtpService::resend(std::string_view challenge_id, Timestamp now) {
  std::lock_guard lock(mu_);
  auto it = challenges_.find(std::string(challenge_id));
  if (it == challenges_.end()) throw Error(ErrorKind::not_found, "unknown challenge");
  Record& rec = it->second;
  refresh(rec, now);
  if (rec.view.state == ChallengeState::verified || rec.view.state == ChallengeState::exhausted) {
    throw Error(ErrorKind::invalid_state, "challenge is " + std::string(to_string(rec.view.state)));
  }
  if (now < rec.view.resend_available_at) {
    throw Error(ErrorKind::rate_limited, "resend cooldown active", rec.view.resend_available_at);
  }
  const PhoneNumber phone = rec.view.phone;
  // A newer challenge for the same phone may already exist; it is replaced too.
  if (auto p = pending_by_phone_.find(phone.e164()); p != pending_by_phone_.end() && p->second != challenge_id) {
    const std::string other = p->second;
    Record& newer = challenges_.at(other);
    refresh(newer, now);
    if (newer.view.state == ChallengeState::pending && now < newer.view.resend_available_at) {
      throw Error(ErrorKind::rate_limited, "resend cooldown active", newer.view.resend_available_at);
    }
    forget(other);
  }
  forget(std::string(challenge_id));
  return issue(phone, now);
}

std::size_t OtpService::purge_stale(Timestamp now) {
  std::lock_guard lock(mu_);
  std::size_t removed = 0;
  for (auto it = challenges_.begin(); it != challenges_.end();) {
    refresh(it->second, now);
    if (it->second.view.state != ChallengeState::pending && it->second.view.expires_at + policy_.ttl <= now) {
      it = challenges_.erase(it);
      ++removed;
    } else {
      ++it;
    }
  }
  return removed;
}

std::optional<OtpChallenge> OtpService::find(std::string_view challenge_id) const {
  std::lock_guard lock(mu_);
  auto it = challenges_.find(std::string(challenge_id));
  if (it == challenges_.end()) return std::nullopt;
  return it->second.view;
}

std::size_t OtpService::pending_count(std::string_view phone, Timestamp now) const {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (const auto& [_, rec] : challenges_) {
    if (rec.view.phone.e164() == phone && rec.view.state == ChallengeState::pending && now < rec.view.expires_at) ++n;
  }
  return n;
}

}  // namespace edgeguard::auth
