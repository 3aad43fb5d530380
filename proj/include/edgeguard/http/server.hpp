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

#include <functional>
#include <memory>
#include <string>

#include "edgeguard/auth/client.hpp"
#include "edgeguard/auth/otp.hpp"
#include "edgeguard/common/time.hpp"
#include "edgeguard/gateway/gateway.hpp"
#include "edgeguard/monitor/monitor.hpp"

namespace edgeguard::http {

using Clock = std::function<Timestamp()>;

// One HTTP listener with any combination of the OTP, gateway and monitor
// APIs mounted. Request and response bodies are JSON; timestamps are epoch
// milliseconds. Failures answer {"error":<kind>,"message":..,"retry_at"?}
// with the status from http_status().
class Server {
 public:
  explicit Server(Clock clock = wall_clock_now);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // POST /otp/request, /otp/verify, /otp/resend
  void mount_otp(std::shared_ptr<auth::OtpService> otp);
  // POST /session/connect, /session/{id}/phone, /session/{id}/otp,
  // /session/{id}/resend, /session/{id}/consent; GET /session/{id},
  // GET /policy/active
  void mount_gateway(std::shared_ptr<gateway::Gateway> gateway);
  // POST /ingest (one flow event per line), GET /stats
  void mount_monitor(std::shared_ptr<monitor::Monitor> monitor);
  // Static files under /portal. Returns false if `dir` does not exist.
  bool mount_portal(const std::string& dir);

  // Binds without serving. Port 0 picks a free port; returns the bound port.
  // Throws Error(storage) when the address cannot be bound.
  int bind(const std::string& host, int port);
  // Serves on a background thread until stop().
  void start();
  // Serves on the calling thread until stop().
  void run();
  void stop();
  int port() const noexcept { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Clock clock_;
  int port_ = -1;
};

// OtpClient that calls a remote OTP service. Transport failures surface as
// Error(delivery); service errors keep their kind and retry_at. The `now`
// arguments are ignored: the service uses its own clock.
class HttpOtpClient final : public auth::OtpClient {
 public:
  explicit HttpOtpClient(std::string base_url);
  ~HttpOtpClient() override;

  auth::ChallengeTicket request(std::string_view phone, Timestamp now) override;
  auth::VerifyOutcome verify(std::string_view challenge_id, std::string_view code, Timestamp now) override;
  auth::ChallengeTicket resend(std::string_view challenge_id, Timestamp now) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace edgeguard::http
