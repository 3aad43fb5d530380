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

#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "edgeguard/auth/phone.hpp"

namespace edgeguard::auth {

struct DeliveryResult {
  bool delivered = false;
  std::string detail;
};

// Out-of-band message channel for one-time codes. Failures are reported in
// the result; implementations should not throw for ordinary delivery errors.
class SmsDispatcher {
 public:
  virtual ~SmsDispatcher() = default;
  virtual DeliveryResult send(const PhoneNumber& to, std::string_view message) = 0;
};

// Prints each message as one line: "SMS to=<phone> body=<message>".
class ConsoleDispatcher final : public SmsDispatcher {
 public:
  explicit ConsoleDispatcher(std::ostream& out) : out_(out) {}
  DeliveryResult send(const PhoneNumber& to, std::string_view message) override;

 private:
  std::mutex mu_;
  std::ostream& out_;
};

// Appends each message as one JSON line {"to":...,"body":...} to a file.
class FileDispatcher final : public SmsDispatcher {
 public:
  explicit FileDispatcher(std::string path);
  DeliveryResult send(const PhoneNumber& to, std::string_view message) override;
  const std::string& path() const noexcept { return path_; }

 private:
  std::mutex mu_;
  std::string path_;
};

// In-memory outbox for tests and simulations.
class MockDispatcher final : public SmsDispatcher {
 public:
  struct Message {
    std::string to;
    std::string body;
  };

  DeliveryResult send(const PhoneNumber& to, std::string_view message) override;

  void fail_deliveries(bool fail);
  std::vector<Message> outbox() const;
  // The 6-digit code in the most recent message to `phone`.
  std::optional<std::string> last_code(std::string_view phone) const;

 private:
  mutable std::mutex mu_;
  bool fail_ = false;
  std::vector<Message> outbox_;
};

// Pulls the first run of 6 digits out of a message body.
std::optional<std::string> extract_code(std::string_view body);

}  // namespace edgeguard::auth
