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
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace edgeguard::crypto {

using Sha256Digest = std::array<std::uint8_t, 32>;

Sha256Digest sha256(std::span<const std::uint8_t> data);
Sha256Digest sha256(std::string_view data);

std::string to_hex(std::span<const std::uint8_t> bytes);
inline std::string sha256_hex(std::string_view data) { return to_hex(sha256(data)); }

// Fills `out` from the operating system CSPRNG. Throws on failure.
void random_bytes(std::span<std::uint8_t> out);

// Uniform integer in [0, bound) drawn from the CSPRNG, without modulo bias.
std::uint32_t random_below(std::uint32_t bound);

// Hex-encoded random token with `bytes` bytes of entropy.
std::string random_token(std::size_t bytes = 16);

// Comparison time depends only on the lengths, never on the contents.
bool constant_time_equal(std::string_view a, std::string_view b) noexcept;

}  // namespace edgeguard::crypto
