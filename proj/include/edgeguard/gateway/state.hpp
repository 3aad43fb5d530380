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

#include <array>
#include <optional>
#include <string_view>

namespace edgeguard::gateway {

enum class SessionState { NEW, PHONE_SUBMITTED, OTP_VERIFIED, CONSENTED, ONLINE, QUARANTINED, EXPIRED };

enum class SessionEvent {
  phone_submitted,
  code_resent,
  otp_verified,
  otp_failed,  // challenge exhausted or expired
  consent_recorded,
  lease_granted,
  intrusion_detected,
  idle_timeout,
};

inline constexpr std::array kAllStates{
    SessionState::NEW,    SessionState::PHONE_SUBMITTED, SessionState::OTP_VERIFIED, SessionState::CONSENTED,
    SessionState::ONLINE, SessionState::QUARANTINED,     SessionState::EXPIRED,
};

inline constexpr std::array kAllEvents{
    SessionEvent::phone_submitted, SessionEvent::code_resent,   SessionEvent::otp_verified,
    SessionEvent::otp_failed,      SessionEvent::consent_recorded, SessionEvent::lease_granted,
    SessionEvent::intrusion_detected, SessionEvent::idle_timeout,
};

std::string_view to_string(SessionState s) noexcept;
std::optional<SessionState> session_state_from_string(std::string_view name) noexcept;
std::string_view to_string(SessionEvent e) noexcept;

// The closed set of admission transitions. Anything not listed is rejected.
//
//   NEW              --phone_submitted-->   PHONE_SUBMITTED
//   PHONE_SUBMITTED  --phone_submitted-->   PHONE_SUBMITTED
//   PHONE_SUBMITTED  --code_resent------>   PHONE_SUBMITTED
//   PHONE_SUBMITTED  --otp_verified----->   OTP_VERIFIED
//   PHONE_SUBMITTED  --otp_failed------->   EXPIRED
//   OTP_VERIFIED     --consent_recorded->   CONSENTED
//   CONSENTED        --lease_granted---->   ONLINE
//   ONLINE           --intrusion_detected-> QUARANTINED
//   any live state   --idle_timeout----->   EXPIRED
//
// EXPIRED is terminal.
constexpr std::optional<SessionState> next_state(SessionState s, SessionEvent e) noexcept {
  using S = SessionState;
  using E = SessionEvent;
  if (e == E::idle_timeout) {
    return s == S::EXPIRED || s == S::CONSENTED ? std::nullopt : std::optional{S::EXPIRED};
  }
  switch (s) {
    case S::NEW:
      if (e == E::phone_submitted) return S::PHONE_SUBMITTED;
      break;
    case S::PHONE_SUBMITTED:
      if (e == E::phone_submitted || e == E::code_resent) return S::PHONE_SUBMITTED;
      if (e == E::otp_verified) return S::OTP_VERIFIED;
      if (e == E::otp_failed) return S::EXPIRED;
      break;
    case S::OTP_VERIFIED:
      if (e == E::consent_recorded) return S::CONSENTED;
      break;
    case S::CONSENTED:
      if (e == E::lease_granted) return S::ONLINE;
      break;
    case S::ONLINE:
      if (e == E::intrusion_detected) return S::QUARANTINED;
      break;
    case S::QUARANTINED:
    case S::EXPIRED:
      break;
  }
  return std::nullopt;
}

}  // namespace edgeguard::gateway
