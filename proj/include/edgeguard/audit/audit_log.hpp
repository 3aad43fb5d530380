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
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "edgeguard/common/time.hpp"

namespace edgeguard::audit {

using Payload = nlohmann::ordered_json;

enum class AuditKind {
  otp_requested,
  otp_verified,
  consent_granted,
  session_online,
  alert_raised,
  session_quarantined,
  lease_granted,
  lease_released,
  session_connected,
  session_expired,
};

std::string_view to_string(AuditKind kind) noexcept;
std::optional<AuditKind> audit_kind_from_string(std::string_view name) noexcept;

// 64 hex zeros; the prev hash of event 0.
extern const std::string kGenesisHash;

struct AuditEvent {
  std::uint64_t seq = 0;
  Timestamp ts;
  AuditKind kind = AuditKind::otp_requested;
  Payload payload = Payload::object();
  std::string prev_hash;
  std::string hash;
};

// SHA-256 hex over the compact serialization of
// {"seq":..,"ts":..,"kind":..,"payload":..,"prev":..} in that key order.
std::string event_hash(std::uint64_t seq, Timestamp ts, AuditKind kind, const Payload& payload,
                       std::string_view prev_hash);

// One log line without the trailing newline. Field order is fixed:
// seq, ts, kind, payload, prev, hash.
std::string format_event(const AuditEvent& event);

struct ChainVerdict {
  bool ok = true;
  std::optional<std::uint64_t> first_bad;
  std::uint64_t events = 0;  // events that verified before the first bad one
};

// Checks every line of a raw log: canonical formatting, contiguous sequence
// numbers, prev linkage and event hashes. Every line, including the last,
// must end in '\n'.
ChainVerdict verify_chain(std::string_view log_bytes);
ChainVerdict verify_chain_file(const std::string& path);

// Where committed lines go. append_line either makes the whole line durable
// or throws Error(storage) leaving the stored bytes unchanged.
class AuditSink {
 public:
  virtual ~AuditSink() = default;
  virtual std::string read_all() = 0;
  virtual void append_line(std::string_view line) = 0;
};

class MemorySink final : public AuditSink {
 public:
  std::string read_all() override { return bytes_; }
  void append_line(std::string_view line) override { bytes_.append(line); }

 private:
  std::string bytes_;
};

// Append-only file; every append is fsync'd, and a short or failed write is
// truncated away.
class FileSink final : public AuditSink {
 public:
  explicit FileSink(std::string path);
  ~FileSink() override;
  FileSink(const FileSink&) = delete;
  FileSink& operator=(const FileSink&) = delete;

  std::string read_all() override;
  void append_line(std::string_view line) override;
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
  int fd_ = -1;
};

// Hash-chained event log with a single serialized writer. Opening an
// existing log verifies it first; a broken chain is refused with
// Error(storage).
class AuditLog {
 public:
  explicit AuditLog(std::unique_ptr<AuditSink> sink);
  static std::unique_ptr<AuditLog> open_file(const std::string& path);
  static std::unique_ptr<AuditLog> in_memory();

  AuditEvent append(AuditKind kind, Payload payload, Timestamp now);

  std::vector<AuditEvent> events() const;
  std::uint64_t size() const;
  std::uint64_t count(AuditKind kind) const;
  std::string head_hash() const;

 private:
  std::unique_ptr<AuditSink> sink_;
  mutable std::mutex mu_;
  std::vector<AuditEvent> events_;
};

}  // namespace edgeguard::audit
