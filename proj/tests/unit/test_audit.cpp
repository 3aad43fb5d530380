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


#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "edgeguard/audit/audit_log.hpp"
#include "edgeguard/audit/consent.hpp"
#include "edgeguard/audit/policy.hpp"
#include "edgeguard/common/crypto.hpp"
#include "edgeguard/common/error.hpp"

using namespace edgeguard;
using namespace edgeguard::audit;
using namespace std::chrono_literals;

namespace fs = std::filesystem;

namespace {

const Timestamp t0 = from_epoch_ms(1'700'000'000'000);

Payload payload_for(int i) {
  Payload p = Payload::object();
  p["session_id"] = "s" + std::to_string(i % 17);
  p["n"] = i;
  p["ratio"] = i / 7.0;
  return p;
}

class FailingSink final : public AuditSink {
 public:
  std::string read_all() override { return bytes; }
  void append_line(std::string_view line) override {
    if (fail) throw Error(ErrorKind::storage, "disk full");
    bytes.append(line);
  }
  std::string bytes;
  bool fail = false;
};

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("edgeguard-audit-" + crypto::random_token(8));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("first event links to the zero sentinel") {
  auto log = AuditLog::in_memory();
  const auto e0 = log->append(AuditKind::session_connected, payload_for(0), t0);
  CHECK(e0.seq == 0);
  CHECK(e0.prev_hash == std::string(64, '0'));
  CHECK(e0.hash == event_hash(0, t0, AuditKind::session_connected, payload_for(0), e0.prev_hash));
  const auto e1 = log->append(AuditKind::otp_requested, payload_for(1), t0 + 1s);
  CHECK(e1.seq == 1);
  CHECK(e1.prev_hash == e0.hash);
  CHECK(log->head_hash() == e1.hash);
}

TEST_CASE("line format has a fixed field order") {
  AuditEvent e;
  e.seq = 3;
  e.ts = from_epoch_ms(1234);
  e.kind = AuditKind::lease_granted;
  e.payload = Payload::object();
  e.payload["ip"] = "10.0.0.2";
  e.prev_hash = std::string(64, 'a');
  e.hash = std::string(64, 'b');
  CHECK(format_event(e) == "{\"seq\":3,\"ts\":1234,\"kind\":\"lease_granted\",\"payload\":{\"ip\":\"10.0.0.2\"},\"prev\":\"" +
                               std::string(64, 'a') + "\",\"hash\":\"" + std::string(64, 'b') + "\"}");
}

TEST_CASE("hash preimage is the documented serialization") {
  Payload p = Payload::object();
  p["k"] = 1;
  const std::string expected = crypto::sha256_hex(
      "{\"seq\":0,\"ts\":5,\"kind\":\"alert_raised\",\"payload\":{\"k\":1},\"prev\":\"" + std::string(64, '0') + "\"}");
  CHECK(event_hash(0, from_epoch_ms(5), AuditKind::alert_raised, p, std::string(64, '0')) == expected);
}

TEST_CASE("kind names round trip") {
  for (int k = 0; k <= static_cast<int>(AuditKind::session_expired); ++k) {
    const auto kind = static_cast<AuditKind>(k);
    CHECK(audit_kind_from_string(to_string(kind)) == kind);
  }
  CHECK_FALSE(audit_kind_from_string("bogus"));
}

TEST_CASE("verify_chain on empty and intact logs") {
  CHECK(verify_chain("").ok);
  FailingSink* raw = nullptr;
  auto sink = std::make_unique<FailingSink>();
  raw = sink.get();
  AuditLog log(std::move(sink));
  for (int i = 0; i < 1000; ++i) log.append(AuditKind::alert_raised, payload_for(i), t0 + Duration{i});
  const auto v = verify_chain(raw->bytes);
  CHECK(v.ok);
  CHECK(v.events == 1000);
  CHECK(log.count(AuditKind::alert_raised) == 1000);
}

TEST_CASE("tampering is located at the first modified event") {
  auto sink = std::make_unique<FailingSink>();
  auto* raw = sink.get();
  AuditLog log(std::move(sink));
  std::vector<std::size_t> line_start;
  for (int i = 0; i < 12; ++i) {
    line_start.push_back(raw->bytes.size());
    log.append(AuditKind::session_online, payload_for(i), t0 + Duration{i});
  }
  const std::string clean = raw->bytes;

  SUBCASE("payload byte flip at event 5") {
    std::string bad = clean;
    const std::size_t at = bad.find("\"n\":5", line_start[5]);
    bad[at + 4] = '6';
    CHECK(verify_chain(bad).first_bad == 5);
  }
  SUBCASE("missing final newline") {
    CHECK(verify_chain(clean.substr(0, clean.size() - 1)).first_bad == 11);
  }
  SUBCASE("dropped event") {
    std::string bad = clean.substr(0, line_start[3]) + clean.substr(line_start[4]);
    CHECK(verify_chain(bad).first_bad == 3);
  }
  SUBCASE("truncated log is still a valid prefix") {
    CHECK(verify_chain(clean.substr(0, line_start[7])).ok);
  }
  SUBCASE("random single byte mutations") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
      std::string bad = clean;
      const std::size_t at = rng() % bad.size();
      char c;
      do {
        c = static_cast<char>(rng() % 256);
      } while (c == bad[at]);
      bad[at] = c;
      const auto expected = static_cast<std::uint64_t>(
          std::upper_bound(line_start.begin(), line_start.end(), at) - line_start.begin() - 1);
      const auto v = verify_chain(bad);
      REQUIRE_FALSE(v.ok);
      CHECK(v.first_bad == expected);
    }
  }
}

TEST_CASE("a failed append leaves the log unchanged") {
  auto sink = std::make_unique<FailingSink>();
  auto* raw = sink.get();
  AuditLog log(std::move(sink));
  log.append(AuditKind::lease_granted, payload_for(0), t0);
  const std::string before = raw->bytes;
  const std::string head = log.head_hash();
  raw->fail = true;
  CHECK_THROWS_AS(log.append(AuditKind::lease_released, payload_for(1), t0 + 1s), Error);
  CHECK(raw->bytes == before);
  CHECK(log.size() == 1);
  CHECK(log.head_hash() == head);
  raw->fail = false;
  CHECK(log.append(AuditKind::lease_released, payload_for(1), t0 + 2s).seq == 1);
  CHECK(verify_chain(raw->bytes).ok);
}

TEST_CASE("file log persists and resumes the chain") {
  TempDir dir;
  const auto path = (dir.path / "audit.log").string();
  {
    auto log = AuditLog::open_file(path);
    for (int i = 0; i < 5; ++i) log->append(AuditKind::otp_verified, payload_for(i), t0 + Duration{i});
  }
  {
    auto log = AuditLog::open_file(path);
    CHECK(log->size() == 5);
    CHECK(log->append(AuditKind::otp_verified, payload_for(5), t0 + 5ms).seq == 5);
  }
  CHECK(verify_chain_file(path).ok);
  CHECK(verify_chain_file(path).events == 6);

  std::string bytes = slurp(path);
  bytes[bytes.find("\"n\":2") + 4] = '9';
  std::ofstream(path, std::ios::binary | std::ios::trunc) << bytes;
  CHECK(verify_chain_file(path).first_bad == 2);
  try {
    AuditLog::open_file(path);
    FAIL("tampered log was opened");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::storage);
  }
}

TEST_CASE("policy documents carry the hash of their text") {
  const auto doc = make_policy("network-use", 1, "Terms", "Be nice.");
  CHECK(doc.content_hash == crypto::sha256_hex("Be nice."));
  CHECK(doc.content_hash.size() == 64);

  const auto parsed = parse_policy(R"({"policy_id":"p","version":2,"text":"abc"})");
  CHECK(parsed.version == 2);
  CHECK(parsed.content_hash == crypto::sha256_hex("abc"));
  CHECK_THROWS_AS(parse_policy(R"({"policy_id":"p","version":1,"text":"abc","content_hash":"00"})"), Error);
  CHECK_THROWS_AS(parse_policy(R"({"policy_id":"p","version":0,"text":"abc"})"), Error);
  CHECK_THROWS_AS(parse_policy("not json"), Error);
}

TEST_CASE("shipped policy fixture loads") {
  const auto doc = load_policy_file(EDGEGUARD_SOURCE_DIR "/config/policy/network-use-v1.json");
  CHECK(doc.policy_id == "network-use");
  CHECK(doc.version == 1);
  CHECK_FALSE(doc.text.empty());
}

TEST_CASE("registry versions strictly increase") {
  PolicyRegistry reg;
  reg.publish(make_policy("p", 1, "", "one"));
  reg.publish(make_policy("p", 3, "", "three"));
  CHECK_THROWS_AS(reg.publish(make_policy("p", 3, "", "again")), Error);
  CHECK_THROWS_AS(reg.publish(make_policy("p", 2, "", "two")), Error);
  auto forged = make_policy("p", 4, "", "four");
  forged.text = "edited";
  CHECK_THROWS_AS(reg.publish(forged), Error);

  CHECK(reg.active("p").version == 3);
  CHECK(reg.find("p", 1)->text == "one");
  CHECK_FALSE(reg.find("p", 2));
  CHECK(reg.is_active(ref_of(reg.active("p"))));
  CHECK_FALSE(reg.is_active(ref_of(*reg.find("p", 1))));
  CHECK_THROWS_AS(reg.active("q"), Error);
}

TEST_CASE("consent binds to the active policy version") {
  PolicyRegistry reg;
  reg.publish(make_policy("p", 2, "", "two"));
  reg.publish(make_policy("p", 3, "", "three"));
  auto log = AuditLog::in_memory();
  ConsentLedger ledger(reg, *log);
  const std::string phone = hash_phone("salt", "+15550001111");

  SUBCASE("active version is recorded with one audit event") {
    const auto rec = ledger.record_consent("s1", phone, ref_of(reg.active("p")), t0);
    CHECK(rec.policy.version == 3);
    CHECK(log->count(AuditKind::consent_granted) == 1);
    const auto ev = log->events().back();
    CHECK(ev.payload["session_id"] == "s1");
    CHECK(ev.payload["version"] == 3);
    CHECK(ev.payload["phone_hash"] == phone);
  }
  SUBCASE("stale version is a mismatch and writes nothing") {
    try {
      ledger.record_consent("s1", phone, ref_of(*reg.find("p", 2)), t0);
      FAIL("expected version mismatch");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::version_mismatch);
    }
    CHECK(log->size() == 0);
    CHECK_FALSE(ledger.find("s1"));
  }
  SUBCASE("wrong hash is a mismatch") {
    auto ref = ref_of(reg.active("p"));
    ref.content_hash = crypto::sha256_hex("something else");
    CHECK_THROWS_AS(ledger.record_consent("s1", phone, ref, t0), Error);
  }
  SUBCASE("double submit returns the same record") {
    const auto a = ledger.record_consent("s1", phone, ref_of(reg.active("p")), t0);
    const auto b = ledger.record_consent("s1", phone, ref_of(reg.active("p")), t0 + 5s);
    CHECK(a == b);
    CHECK(log->count(AuditKind::consent_granted) == 1);
  }
  SUBCASE("storage failure records nothing") {
    auto sink = std::make_unique<FailingSink>();
    sink->fail = true;
    AuditLog broken(std::move(sink));
    ConsentLedger l2(reg, broken);
    CHECK_THROWS_AS(l2.record_consent("s1", phone, ref_of(reg.active("p")), t0), Error);
    CHECK_FALSE(l2.find("s1"));
  }
}

TEST_CASE("phone hashes are salted") {
  CHECK(hash_phone("a", "+15550001111") != hash_phone("b", "+15550001111"));
  CHECK(hash_phone("a", "+15550001111") == hash_phone("a", "+15550001111"));
  CHECK(hash_phone("a", "+15550001111").find("5550001111") == std::string::npos);
}
