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
#include <string>
#include <string_view>

#include "edgeguard/auth/otp.hpp"
#include "edgeguard/common/time.hpp"

namespace edgeguard::auth {

// What a caller of the OTP service learns about a new challenge.
struct ChallengeTicket {
  std::string challenge_id;
  Timestamp expires_at;
  Timestamp resend_available_at;
};

ChallengeTicket ticket_of(const OtpChallenge& challenge);

// The gateway's view of the OTP service, in-process or over HTTP. Errors are
// reported as edgeguard::Error with the service's ErrorKind.
class OtpClient {
 public:
  virtual ~OtpClient() = default;
  virtual ChallengeTicket request(std::string_view phone, Timestamp now) = 0;
  virtual VerifyOutcome verify(std::string_view challenge_id, std::string_view code, Timestamp now) = 0;
  virtual ChallengeTicket resend(std::string_view challenge_id, Timestamp now) = 0;
};

class LocalOtpClient final : public OtpClient {
 public:
  explicit LocalOtpClient(std::shared_ptr<OtpService> service) : service_(std::move(service)) {}

  ChallengeTicket request(std::string_view phone, Timestamp now) override {
    return ticket_of(service_->request(phone, now));
  }
  VerifyOutcome verify(std::string_view challenge_id, std::string_view code, Timestamp now) override {
    return service_->verify(challenge_id, code, now);
  }
  ChallengeTicket resend(std::string_view challenge_id, Timestamp now) override {
    return ticket_of(service_->resend(challenge_id, now));
  }

 private:
  std::shared_ptr<OtpService> service_;
};

}  // namespace edgeguard::auth
