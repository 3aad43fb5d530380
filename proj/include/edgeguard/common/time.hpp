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

namespace edgeguard {

// All protocol timestamps are wall-clock instants with millisecond resolution.
// They travel on the wire and in the audit log as integer epoch milliseconds.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Duration = std::chrono::milliseconds;

inline std::int64_t to_epoch_ms(Timestamp t) noexcept { return t.time_since_epoch().count(); }

inline Timestamp from_epoch_ms(std::int64_t ms) noexcept { return Timestamp{Duration{ms}}; }

inline Timestamp wall_clock_now() noexcept {
  return std::chrono::time_point_cast<Duration>(std::chrono::system_clock::now());
}

}  // namespace edgeguard
