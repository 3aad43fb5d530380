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

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "edgeguard/common/time.hpp"

namespace edgeguard {

// Failure categories shared by the library and the HTTP layer. Each maps to
// exactly one HTTP status code (see http_status()).
enum class ErrorKind {
  validation,        // 400
  not_found,         // 404
  invalid_state,     // 409
  version_mismatch,  // 409
  rate_limited,      // 429
  delivery,          // 502
  pool_exhausted,    // 503
  storage,           // 500
  not_admitted,      // 403
};

std::string_view to_string(ErrorKind kind) noexcept;
std::optional<ErrorKind> error_kind_from_string(std::string_view name) noexcept;
int http_status(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<Timestamp> retry_at = std::nullopt)
      : std::runtime_error(message), kind_(kind), retry_at_(retry_at) {}

  ErrorKind kind() const noexcept { return kind_; }
  // Set for rate_limited errors: the earliest instant a retry can succeed.
  const std::optional<Timestamp>& retry_at() const noexcept { return retry_at_; }

 private:
  ErrorKind kind_;
  std::optional<Timestamp> retry_at_;
};

}  // namespace edgeguard
