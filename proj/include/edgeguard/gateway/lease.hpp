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

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "edgeguard/common/time.hpp"

namespace edgeguard::gateway {

using namespace std::chrono_literals;

// IPv4 address in host byte order.
struct Ipv4 {
  std::uint32_t value = 0;
  auto operator<=>(const Ipv4&) const = default;
};

// Throws Error(validation) unless `text` is a dotted quad.
Ipv4 parse_ipv4(std::string_view text);
std::string to_string(Ipv4 ip);

// Host addresses of a CIDR block. Network and broadcast addresses are left
// out for prefixes up to /30. Throws Error(validation).
std::vector<Ipv4> cidr_hosts(std::string_view cidr);
// Inclusive.
std::vector<Ipv4> address_range(Ipv4 first, Ipv4 last);
// Hosts of `cidr` minus `exclusions`; each exclusion is a single address or
// an inclusive "a-b" range.
std::vector<Ipv4> pool_addresses(std::string_view cidr, const std::vector<std::string>& exclusions);

enum class LeaseState { active, released, expired };
std::string_view to_string(LeaseState s) noexcept;

struct Lease {
  std::uint64_t lease_id = 0;
  Ipv4 ip;
  std::string device_id;
  Timestamp granted_at;
  Timestamp expires_at;
  LeaseState state = LeaseState::active;
};

// DHCP-style allocator. Each address and each device holds at most one
// active lease; a lease is active until released or until `expires_at`
// (exclusive). Expired leases are reclaimed lazily before allocation.
class LeasePool {
 public:
  explicit LeasePool(std::vector<Ipv4> addresses, Duration lease_time = 3600s);

  // Lowest free address. A device that already holds an active lease gets
  // that lease back unchanged. Errors: pool_exhausted.
  Lease allocate(std::string_view device_id, Timestamp now);
  // Errors: not_found when no active lease has this id.
  Lease release(std::uint64_t lease_id, Timestamp now);
  // Extends an active lease to now + lease_time. Errors: not_found.
  Lease renew(std::uint64_t lease_id, Timestamp now);
  // Moves every lease past its expiry to expired and returns them.
  std::vector<Lease> expire(Timestamp now);

  std::optional<Lease> find(std::uint64_t lease_id) const;
  std::optional<Lease> active_for_device(std::string_view device_id, Timestamp now) const;
  std::vector<Lease> active_leases(Timestamp now) const;

  std::size_t capacity() const noexcept { return addresses_.size(); }
  std::size_t free_count(Timestamp now) const;
  Duration lease_time() const noexcept { return lease_time_; }

 private:
  std::vector<Lease> reclaim(Timestamp now);

  std::vector<Ipv4> addresses_;
  Duration lease_time_;
  mutable std::mutex mu_;
  std::set<Ipv4> free_;
  std::map<std::uint64_t, Lease> active_;
  std::unordered_map<std::string, std::uint64_t> by_device_;
  std::uint64_t next_id_ = 1;
};

}  // namespace edgeguard::gateway
