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


#include "edgeguard/common/error.hpp"

namespace edgeguard {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::not_found: return "not_found";
    case ErrorKind::invalid_state: return "invalid_state";
    case ErrorKind::version_mismatch: return "version_mismatch";
    case ErrorKind::rate_limited: return "rate_limited";
    case ErrorKind::delivery: return "delivery";
    case ErrorKind::pool_exhausted: return "pool_exhausted";
    case ErrorKind::storage: return "storage";
    case ErrorKind::not_admitted: return "not_admitted";
  }
  return "unknown";
}

std::optional<ErrorKind> error_kind_from_string(std::string_view name) noexcept {
  for (ErrorKind k : {ErrorKind::validation, ErrorKind::not_found, ErrorKind::invalid_state, ErrorKind::version_mismatch,
                      ErrorKind::rate_limited, ErrorKind::delivery, ErrorKind::pool_exhausted, ErrorKind::storage,
                      ErrorKind::not_admitted}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

int http_status(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::validation: return 400;
    case ErrorKind::not_found: return 404;
    case ErrorKind::invalid_state:
    case ErrorKind::version_mismatch: return 409;
    case ErrorKind::rate_limited: return 429;
    case ErrorKind::delivery: return 502;
    case ErrorKind::pool_exhausted: return 503;
    case ErrorKind::storage: return 500;
    case ErrorKind::not_admitted: return 403;
  }
  return 500;
}

}  // namespace edgeguard
