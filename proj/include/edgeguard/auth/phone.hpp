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

#include <string>
#include <string_view>

namespace edgeguard::auth {

// "+" followed by 8 to 15 digits, nothing else.
bool is_e164(std::string_view text) noexcept;

class PhoneNumber {
 public:
  PhoneNumber() = default;
  // Throws Error(validation) unless `text` is E.164 shaped.
  static PhoneNumber parse(std::string_view text);

  const std::string& e164() const noexcept { return e164_; }
  bool operator==(const PhoneNumber&) const = default;

 private:
  explicit PhoneNumber(std::string e164) : e164_(std::move(e164)) {}
  std::string e164_;
};

}  // namespace edgeguard::auth
