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


#include "edgeguard/auth/dispatcher.hpp"

#include <nlohmann/json.hpp>

namespace edgeguard::auth {

DeliveryResult ConsoleDispatcher::send(const PhoneNumber& to, std::string_view message) {
  std::lock_guard lock(mu_);
  out_ << "SMS to=" << to.e164() << " body=" << message << std::endl;
  if (!out_) return {false, "console write failed"};
  return {true, "console"};
}

FileDispatcher::FileDispatcher(std::string path) : path_(std::move(path)) {}

DeliveryResult FileDispatcher::send(const PhoneNumber& to, std::string_view message) {
  std::lock_guard lock(mu_);
  std::ofstream out(path_, std::ios::app);
  if (!out) return {false, "cannot open outbox " + path_};
  out << nlohmann::json{{"to", to.e164()}, {"body", message}}.dump() << '\n';
  out.flush();
  if (!out) return {false, "outbox write failed"};
  return {true, path_};
}

DeliveryResult MockDispatcher::send(const PhoneNumber& to, std::string_view message) {
  std::lock_guard lock(mu_);
  if (fail_) return {false, "mock delivery failure"};
  outbox_.push_back({to.e164(), std::string(message)});
  return {true, "mock"};
}

void MockDispatcher::fail_deliveries(bool fail) {
  std::lock_guard lock(mu_);
  fail_ = fail;
}

std::vector<MockDispatcher::Message> MockDispatcher::outbox() const {
  std::lock_guard lock(mu_);
  return outbox_;
}

std::optional<std::string> MockDispatcher::last_code(std::string_view phone) const {
  std::lock_guard lock(mu_);
  for (auto it = outbox_.rbegin(); it != outbox_.rend(); ++it) {
    if (it->to == phone) return extract_code(it->body);
  }
  return std::nullopt;
}

std::optional<std::string> extract_code(std::string_view body) {
  std::size_t run = 0;
  for (std::size_t i = 0; i <= body.size(); ++i) {
    const bool digit = i < body.size() && body[i] >= '0' && body[i] <= '9';
    if (digit) {
      ++run;
      continue;
    }
    if (run == 6) return std::string(body.substr(i - 6, 6));
    run = 0;
  }
  return std::nullopt;
}

}  // namespace edgeguard::auth
