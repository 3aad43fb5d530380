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


#include "edgeguard/audit/audit_log.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "edgeguard/common/crypto.hpp"
#include "edgeguard/common/error.hpp"

namespace edgeguard::audit {

namespace {

constexpr std::array kAllKinds{
    AuditKind::otp_requested, AuditKind::otp_verified,       AuditKind::consent_granted,
    AuditKind::session_online, AuditKind::alert_raised,      AuditKind::session_quarantined,
    AuditKind::lease_granted,  AuditKind::lease_released,    AuditKind::session_connected,
    AuditKind::session_expired,
};

Error storage_error(const std::string& what) {
  return Error(ErrorKind::storage, what + ": " + std::strerror(errno));
}

void rollback(int fd, off_t size) noexcept {
  while (::ftruncate(fd, size) != 0 && errno == EINTR) {
  }
}

bool is_lower_hex64(const std::string& s) {
  if (s.size() != 64) return false;
  for (char c : s) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

// Parses one line into an event; nullopt if it is not exactly the canonical
// serialization of some event.
std::optional<AuditEvent> parse_line(std::string_view line) {
  Payload j;
  try {
    j = Payload::parse(line);
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
  if (!j.is_object() || j.size() != 6) return std::nullopt;
  AuditEvent e;
  try {
    const auto& seq = j.at("seq");
    const auto& ts = j.at("ts");
    if (!seq.is_number_unsigned() || !ts.is_number_integer()) return std::nullopt;
    e.seq = seq.get<std::uint64_t>();
    e.ts = from_epoch_ms(ts.get<std::int64_t>());
    auto kind = audit_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) return std::nullopt;
    e.kind = *kind;
    e.payload = j.at("payload");
    e.prev_hash = j.at("prev").get<std::string>();
    e.hash = j.at("hash").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
  if (!e.payload.is_object() || !is_lower_hex64(e.prev_hash) || !is_lower_hex64(e.hash)) return std::nullopt;
  try {
    if (format_event(e) != line) return std::nullopt;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
  return e;
}

std::vector<AuditEvent> load_chain(std::string_view bytes) {
  std::vector<AuditEvent> out;
  const ChainVerdict verdict = verify_chain(bytes);
  if (!verdict.ok) {
    throw Error(ErrorKind::storage,
                "audit log fails verification at event " + std::to_string(*verdict.first_bad));
  }
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const std::size_t nl = bytes.find('\n', pos);
    out.push_back(*parse_line(bytes.substr(pos, nl - pos)));
    pos = nl + 1;
  }
  return out;
}

}  // namespace

const std::string kGenesisHash(64, '0');

std::string_view to_string(AuditKind kind) noexcept {
  switch (kind) {
    case AuditKind::otp_requested: return "otp_requested";
    case AuditKind::otp_verified: return "otp_verified";
    case AuditKind::consent_granted: return "consent_granted";
    case AuditKind::session_online: return "session_online";
    case AuditKind::alert_raised: return "alert_raised";
    case AuditKind::session_quarantined: return "session_quarantined";
    case AuditKind::lease_granted: return "lease_granted";
    case AuditKind::lease_released: return "lease_released";
    case AuditKind::session_connected: return "session_connected";
    case AuditKind::session_expired: return "session_expired";
  }
  return "unknown";
}

std::optional<AuditKind> audit_kind_from_string(std::string_view name) noexcept {
  for (AuditKind k : kAllKinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::string event_hash(std::uint64_t seq, Timestamp ts, AuditKind kind, const Payload& payload,
                       std::string_view prev_hash) {
  Payload pre = Payload::object();
  pre["seq"] = seq;
  pre["ts"] = to_epoch_ms(ts);
  pre["kind"] = to_string(kind);
  pre["payload"] = payload;
  pre["prev"] = prev_hash;
  return crypto::sha256_hex(pre.dump());
}

std::string format_event(const AuditEvent& e) {
  Payload j = Payload::object();
  j["seq"] = e.seq;
  j["ts"] = to_epoch_ms(e.ts);
  j["kind"] = to_string(e.kind);
  j["payload"] = e.payload;
  j["prev"] = e.prev_hash;
  j["hash"] = e.hash;
  return j.dump();
}

ChainVerdict verify_chain(std::string_view bytes) {
  ChainVerdict v;
  std::string prev = kGenesisHash;
  std::size_t pos = 0;
  std::uint64_t index = 0;
  auto fail = [&] {
    v.ok = false;
    v.first_bad = index;
    return v;
  };
  while (pos < bytes.size()) {
    const std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos) return fail();
    const auto e = parse_line(bytes.substr(pos, nl - pos));
    if (!e || e->seq != index || e->prev_hash != prev) return fail();
    if (event_hash(e->seq, e->ts, e->kind, e->payload, e->prev_hash) != e->hash) return fail();
    prev = e->hash;
    pos = nl + 1;
    ++index;
    v.events = index;
  }
  return v;
}

ChainVerdict verify_chain_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::not_found, "cannot open audit log " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return verify_chain(ss.str());
}

FileSink::FileSink(std::string path) : path_(std::move(path)) {
  fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0640);
  if (fd_ < 0) throw storage_error("cannot open audit log " + path_);
}

FileSink::~FileSink() {
  if (fd_ >= 0) ::close(fd_);
}

std::string FileSink::read_all() {
  std::string out;
  std::array<char, 1 << 16> buf;
  off_t off = 0;
  for (;;) {
    const ssize_t n = ::pread(fd_, buf.data(), buf.size(), off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw storage_error("cannot read audit log " + path_);
    }
    if (n == 0) break;
    out.append(buf.data(), static_cast<std::size_t>(n));
    off += n;
  }
  return out;
}

void FileSink::append_line(std::string_view line) {
  struct stat st {};
  if (::fstat(fd_, &st) != 0) throw storage_error("cannot stat audit log " + path_);
  const off_t before = st.st_size;
  std::size_t done = 0;
  while (done < line.size()) {
    const ssize_t n = ::write(fd_, line.data() + done, line.size() - done);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      const Error err = storage_error("cannot append to audit log " + path_);
      rollback(fd_, before);
      throw err;
    }
    done += static_cast<std::size_t>(n);
  }
  if (::fsync(fd_) != 0) {
    const Error err = storage_error("cannot sync audit log " + path_);
    rollback(fd_, before);
    throw err;
  }
}

AuditLog::AuditLog(std::unique_ptr<AuditSink> sink) : sink_(std::move(sink)) {
  if (!sink_) throw std::invalid_argument("AuditLog: sink required");
  events_ = load_chain(sink_->read_all());
}

std::unique_ptr<AuditLog> AuditLog::open_file(const std::string& path) {
  return std::make_unique<AuditLog>(std::make_unique<FileSink>(path));
}

std::unique_ptr<AuditLog> AuditLog::in_memory() { return std::make_unique<AuditLog>(std::make_unique<MemorySink>()); }

AuditEvent AuditLog::append(AuditKind kind, Payload payload, Timestamp now) {
  if (!payload.is_object()) throw Error(ErrorKind::validation, "audit payload must be an object");
  std::lock_guard lock(mu_);
  AuditEvent e;
  e.seq = events_.size();
  e.ts = now;
  e.kind = kind;
  e.payload = std::move(payload);
  e.prev_hash = events_.empty() ? kGenesisHash : events_.back().hash;
  std::string line;
  try {
    e.hash = event_hash(e.seq, e.ts, e.kind, e.payload, e.prev_hash);
    line = format_event(e);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::validation, std::string("audit payload not serializable: ") + ex.what());
  }
  line.push_back('\n');
  sink_->append_line(line);
  events_.push_back(e);
  return e;
}

std::vector<AuditEvent> AuditLog::events() const {
  std::lock_guard lock(mu_);
  return events_;
}

std::uint64_t AuditLog::size() const {
  std::lock_guard lock(mu_);
  return events_.size();
}

std::uint64_t AuditLog::count(AuditKind kind) const {
  std::lock_guard lock(mu_);
  std::uint64_t n = 0;
  for (const auto& e : events_) n += e.kind == kind;
  return n;
}

std::string AuditLog::head_hash() const {
  std::lock_guard lock(mu_);
  return events_.empty() ? kGenesisHash : events_.back().hash;
}

}  // namespace edgeguard::audit
