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

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "edgeguard/auth/dispatcher.hpp"
#include "edgeguard/auth/phone.hpp"
#include "edgeguard/common/time.hpp"

namespace edgeguard::auth {

using namespace std::chrono_literals;

inline constexpr std::size_t kCodeDigits = 6;

struct OtpPolicy {
  Duration ttl = 300s;
  std::uint32_t max_attempts = 3;
  Duration resend_cooldown = 30s;
};

enum class ChallengeState { pending, verified, expired, exhausted };
std::string_view to_string(ChallengeState s) noexcept;

// Caller-facing view of a challenge. The code itself is never exposed.
struct OtpChallenge {
  std::string challenge_id;
  PhoneNumber phone;
  Timestamp created_at;
  Timestamp expires_at;
  Timestamp resend_available_at;
  std::uint32_t attempts_remaining = 0;
  ChallengeState state = ChallengeState::pending;
};

enum class RejectReason { invalid_code, expired, exhausted, already_used };
std::string_view to_string(RejectReason r) noexcept;

struct VerifyOutcome {
  bool verified = false;
  std::optional<RejectReason> reason;
  std::uint32_t attempts_remaining = 0;
};

// Uniform 6-digit decimal code from the OS CSPRNG.
std::string generate_code();

// Challenge registry. At most one pending challenge exists per phone number.
// All operations are serialized, so cooldown checks and attempt decrements
// are atomic.
class OtpService {
 public:
  explicit OtpService(std::shared_ptr<SmsDispatcher> dispatcher, OtpPolicy policy = {});

  // Errors: validation (bad phone), rate_limited (an unexpired challenge for
  // this phone is still inside its cooldown), delivery (dispatcher failed;
  // nothing is stored).
  OtpChallenge request(std::string_view phone, Timestamp now);

  // Expiry is closed: a code submitted at exactly expires_at is rejected.
  // Errors: not_found, validation (code is not 6 digits).
  VerifyOutcome verify(std::string_view challenge_id, std::string_view code, Timestamp now);

  // Replaces a pending or expired challenge with a fresh one under a new id.
  // Errors: not_found, invalid_state (verified or exhausted), rate_limited,
  // delivery.
  OtpChallenge resend(std::string_view challenge_id, Timestamp now);

  std::optional<OtpChallenge> find(std::string_view challenge_id) const;
  // Challenges for `phone` that are pending and unexpired at `now`.
  std::size_t pending_count(std::string_view phone, Timestamp now) const;

  // Drops settled challenges whose expiry is more than one ttl in the past.
  std::size_t purge_stale(Timestamp now);

  const OtpPolicy& policy() const noexcept { return policy_; }

 private:
  struct Record {
    OtpChallenge view;
    std::string salt;
    std::string code_hash;
  };

  OtpChallenge issue(const PhoneNumber& phone, Timestamp now);
  void refresh(Record& rec, Timestamp now);
  void forget(const std::string& challenge_id);

  std::shared_ptr<SmsDispatcher> dispatcher_;
  OtpPolicy policy_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, Record> challenges_;
  std::unordered_map<std::string, std::string> pending_by_phone_;
};

}  // namespace edgeguard::auth
