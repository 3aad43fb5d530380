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


#include "edgeguard/gateway/lease.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <charconv>

#include "edgeguard/common/error.hpp"

namespace edgeguard::gateway {

Ipv4 parse_ipv4(std::string_view text) {
  const std::string s(text);
  in_addr addr{};
  if (::inet_pton(AF_INET, s.c_str(), &addr) != 1) throw Error(ErrorKind::validation, "not an IPv4 address: " + s);
  return Ipv4{ntohl(addr.s_addr)};
}

std::string to_string(Ipv4 ip) {
  in_addr addr{};
  addr.s_addr = htonl(ip.value);
  char buf[INET_ADDRSTRLEN];
  ::inet_ntop(AF_INET, &addr, buf, sizeof buf);
  return buf;
}

std::vector<Ipv4> address_range(Ipv4 first, Ipv4 last) {
  if (last < first) throw Error(ErrorKind::validation, "address range is reversed");
  if (last.value - first.value >= (1u << 24)) throw Error(ErrorKind::validation, "address range too large");
  std::vector<Ipv4> out;
  for (std::uint64_t v = first.value; v <= last.value; ++v) out.push_back(Ipv4{static_cast<std::uint32_t>(v)});
  return out;
}

std::vector<Ipv4> cidr_hosts(std::string_view cidr) {
  const auto slash = cidr.find('/');
  if (slash == std::string_view::npos) throw Error(ErrorKind::validation, "CIDR needs a prefix length: " + std::string(cidr));
  const Ipv4 base = parse_ipv4(cidr.substr(0, slash));
  const auto len_text = cidr.substr(slash + 1);
  int prefix = -1;
  const auto [end, ec] = std::from_chars(len_text.data(), len_text.data() + len_text.size(), prefix);
  if (ec != std::errc{} || end != len_text.data() + len_text.size() || prefix < 8 || prefix > 32) {
    throw Error(ErrorKind::validation, "CIDR prefix must be 8..32: " + std::string(cidr));
  }
  const std::uint32_t mask = ~std::uint32_t{0} << (32 - prefix);
  const Ipv4 network{base.value & mask};
  const Ipv4 broadcast{network.value | ~mask};
  if (prefix >= 31) return address_range(network, broadcast);
  return address_range(Ipv4{network.value + 1}, Ipv4{broadcast.value - 1});
}

std::vector<Ipv4> pool_addresses(std::string_view cidr, const std::vector<std::string>& exclusions) {
  std::vector<Ipv4> hosts = cidr_hosts(cidr);
  std::set<Ipv4> excluded;
  for (const auto& ex : exclusions) {
    const auto dash = ex.find('-');
    const auto range = dash == std::string::npos
                           ? std::vector<Ipv4>{parse_ipv4(ex)}
                           : address_range(parse_ipv4(ex.substr(0, dash)), parse_ipv4(ex.substr(dash + 1)));
    excluded.insert(range.begin(), range.end());
  }
  std::erase_if(hosts, [&](Ipv4 ip) { return excluded.count(ip) > 0; });
  return hosts;
}

std::string_view to_string(LeaseState s) noexcept {
  switch (s) {
    case LeaseState::active: return "active";
    case LeaseState::released: return "released";
    case LeaseState::expired: return "expired";
  }
  return "unknown";
}

LeasePool::LeasePool(std::vector<Ipv4> addresses, Duration lease_time)
    : addresses_(std::move(addresses)), lease_time_(lease_time) {
  std::sort(addresses_.begin(), addresses_.end());
  addresses_.erase(std::unique(addresses_.begin(), addresses_.end()), addresses_.end());
  if (addresses_.empty()) throw Error(ErrorKind::validation, "address pool is empty");
  if (lease_time_ <= Duration::zero()) throw Error(ErrorKind::validation, "lease time must be positive");
  free_.insert(addresses_.begin(), addresses_.end());
}

std::vector<Lease> LeasePool::reclaim(Timestamp now) {
  std::vector<Lease> out;
  for (auto it = active_.begin(); it != active_.end();) {
    if (now >= it->second.expires_at) {
      Lease l = it->second;
      l.state = LeaseState::expired;
      free_.insert(l.ip);
      by_device_.erase(l.device_id);
      it = active_.erase(it);
      out.push_back(std::move(l));
    } else {
      ++it;
    }
  }
  return out;
}

Lease LeasePool::allocate(std::string_view device_id, Timestamp now) {
  if (device_id.empty()) throw Error(ErrorKind::validation, "device_id is empty");
  std::lock_guard lock(mu_);
  reclaim(now);
  if (auto d = by_device_.find(std::string(device_id)); d != by_device_.end()) return active_.at(d->second);
  if (free_.empty()) throw Error(ErrorKind::pool_exhausted, "address pool exhausted");
  const Ipv4 ip = *free_.begin();
  free_.erase(free_.begin());
  Lease l{next_id_++, ip, std::string(device_id), now, now + lease_time_, LeaseState::active};
  by_device_[l.device_id] = l.lease_id;
  active_.emplace(l.lease_id, l);
  return l;
}

Lease LeasePool::release(std::uint64_t lease_id, Timestamp now) {
  std::lock_guard lock(mu_);
  reclaim(now);
  auto it = active_.find(lease_id);
  if (it == active_.end()) throw Error(ErrorKind::not_found, "no active lease " + std::to_string(lease_id));
  Lease l = it->second;
  l.state = LeaseState::released;
  free_.insert(l.ip);
  by_device_.erase(l.device_id);
  active_.erase(it);
  return l;
}

Lease LeasePool::renew(std::uint64_t lease_id, Timestamp now) {
  std::lock_guard lock(mu_);
  reclaim(now);
  auto it = active_.find(lease_id);
  if (it == active_.end()) throw Error(ErrorKind::not_found, "no active lease " + std::to_string(lease_id));
  it->second.expires_at = now + lease_time_;
  return it->second;
}

std::vector<Lease> LeasePool::expire(Timestamp now) {
  std::lock_guard lock(mu_);
  return reclaim(now);
}

std::optional<Lease> LeasePool::find(std::uint64_t lease_id) const {
  std::lock_guard lock(mu_);
  auto it = active_.find(lease_id);
  if (it == active_.end()) return std::nullopt;
  return it->second;
}

std::optional<Lease> LeasePool::active_for_device(std::string_view device_id, Timestamp now) const {
  std::lock_guard lock(mu_);
  auto d = by_device_.find(std::string(device_id));
  if (d == by_device_.end()) return std::nullopt;
  const Lease& l = active_.at(d->second);
  if (now >= l.expires_at) return std::nullopt;
  return l;
}

std::vector<Lease> LeasePool::active_leases(Timestamp now) const {
  std::lock_guard lock(mu_);
  std::vector<Lease> out;
  for (const auto& [_, l] : active_) {
    if (now < l.expires_at) out.push_back(l);
  }
  return out;
}

std::size_t LeasePool::free_count(Timestamp now) const {
  std::lock_guard lock(mu_);
  std::size_t n = free_.size();
  for (const auto& [_, l] : active_) n += now >= l.expires_at;
  return n;
}

}  // namespace edgeguard::gateway
