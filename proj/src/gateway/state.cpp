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


#include "edgeguard/gateway/state.hpp"

namespace edgeguard::gateway {

std::string_view to_string(SessionState s) noexcept {
  switch (s) {
    case SessionState::NEW: return "NEW";
    case SessionState::PHONE_SUBMITTED: return "PHONE_SUBMITTED";
    case SessionState::OTP_VERIFIED: return "OTP_VERIFIED";
    case SessionState::CONSENTED: return "CONSENTED";
    case SessionState::ONLINE: return "ONLINE";
    case SessionState::QUARANTINED: return "QUARANTINED";
    case SessionState::EXPIRED: return "EXPIRED";
  }
  return "UNKNOWN";
}

std::optional<SessionState> session_state_from_string(std::string_view name) noexcept {
  for (SessionState s : kAllStates) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::string_view to_string(SessionEvent e) noexcept {
  switch (e) {
    case SessionEvent::phone_submitted: return "phone_submitted";
    case SessionEvent::code_resent: return "code_resent";
    case SessionEvent::otp_verified: return "otp_verified";
    case SessionEvent::otp_failed: return "otp_failed";
    case SessionEvent::consent_recorded: return "consent_recorded";
    case SessionEvent::lease_granted: return "lease_granted";
    case SessionEvent::intrusion_detected: return "intrusion_detected";
    case SessionEvent::idle_timeout: return "idle_timeout";
  }
  return "unknown";
}

}  // namespace edgeguard::gateway
