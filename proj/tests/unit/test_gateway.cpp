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

#include <map>
#include <random>
#include <set>

#include "edgeguard/common/error.hpp"
#include "edgeguard/gateway/gateway.hpp"
#include "edgeguard/gateway/lease.hpp"
#include "edgeguard/gateway/state.hpp"
#include "gateway_harness.hpp"

using namespace edgeguard;
using namespace edgeguard::gateway;
using namespace std::chrono_literals;
using edgeguard::testing::GatewayHarness;

namespace {

const Timestamp t0 = from_epoch_ms(1'700'000'000'000);

ErrorKind kind_of_error(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an edgeguard::Error");
  return ErrorKind::storage;
}

std::vector<audit::AuditKind> kinds(const audit::AuditLog& log) {
  std::vector<audit::AuditKind> out;
  for (const auto& e : log.events()) out.push_back(e.kind);
  return out;
}

}  // namespace

TEST_CASE("ipv4 parsing and cidr expansion") {
  CHECK(to_string(parse_ipv4("10.0.0.2")) == "10.0.0.2");
  CHECK(parse_ipv4("10.0.0.2").value == 0x0A000002u);
  CHECK_THROWS_AS(parse_ipv4("10.0.0"), Error);
  CHECK_THROWS_AS(parse_ipv4("10.0.0.256"), Error);

  const auto hosts = cidr_hosts("10.0.0.0/29");
  REQUIRE(hosts.size() == 6);
  CHECK(to_string(hosts.front()) == "10.0.0.1");
  CHECK(to_string(hosts.back()) == "10.0.0.6");
  CHECK(cidr_hosts("10.0.0.7/32").size() == 1);
  CHECK(cidr_hosts("192.168.1.77/24").size() == 254);
  CHECK_THROWS_AS(cidr_hosts("10.0.0.0"), Error);
  CHECK_THROWS_AS(cidr_hosts("10.0.0.0/33"), Error);

  const auto pool = pool_addresses("10.0.0.0/29", {"10.0.0.1", "10.0.0.4-10.0.0.5"});
  REQUIRE(pool.size() == 3);
  CHECK(to_string(pool[0]) == "10.0.0.2");
  CHECK(to_string(pool[2]) == "10.0.0.6");
}

TEST_CASE("lowest free address first, then exhaustion, then recycling") {
  LeasePool pool(address_range(parse_ipv4("10.0.0.2"), parse_ipv4("10.0.0.4")));
  const auto a = pool.allocate("dev-a", t0);
  const auto b = pool.allocate("dev-b", t0 + 1s);
  CHECK(to_string(a.ip) == "10.0.0.2");
  CHECK(to_string(b.ip) == "10.0.0.3");
  CHECK(a.expires_at == t0 + 3600s);
  const auto c = pool.allocate("dev-c", t0 + 2s);
  CHECK(to_string(c.ip) == "10.0.0.4");
  CHECK(kind_of_error([&] { pool.allocate("dev-d", t0 + 3s); }) == ErrorKind::pool_exhausted);

  // a's lease lapses at t0 + 3600 s; b and c were granted later
  const auto d = pool.allocate("dev-d", t0 + 3600s);
  CHECK(to_string(d.ip) == "10.0.0.2");
  CHECK_FALSE(pool.find(a.lease_id));
}

TEST_CASE("a device holds one lease") {
  LeasePool pool(address_range(parse_ipv4("10.0.0.2"), parse_ipv4("10.0.0.9")), 100s);
  const auto a = pool.allocate("dev", t0);
  const auto again = pool.allocate("dev", t0 + 5s);
  CHECK(again.lease_id == a.lease_id);
  CHECK(pool.active_leases(t0 + 5s).size() == 1);

  const auto renewed = pool.renew(a.lease_id, t0 + 50s);
  CHECK(renewed.expires_at == t0 + 150s);
  const auto released = pool.release(a.lease_id, t0 + 60s);
  CHECK(released.state == LeaseState::released);
  CHECK(kind_of_error([&] { pool.release(a.lease_id, t0 + 61s); }) == ErrorKind::not_found);
  CHECK(pool.free_count(t0 + 61s) == 8);

  const auto b = pool.allocate("dev", t0 + 70s);
  CHECK(b.lease_id != a.lease_id);
  const auto lapsed = pool.expire(t0 + 170s);
  REQUIRE(lapsed.size() == 1);
  CHECK(lapsed[0].state == LeaseState::expired);
  CHECK(kind_of_error([&] { pool.renew(b.lease_id, t0 + 171s); }) == ErrorKind::not_found);
}

TEST_CASE("empty pools are rejected") {
  CHECK_THROWS_AS(LeasePool(std::vector<Ipv4>{}), Error);
  CHECK_THROWS_AS(LeasePool(pool_addresses("10.0.0.0/30", {"10.0.0.1-10.0.0.2"})), Error);
}

TEST_CASE("transition table is exactly the documented one") {
  using S = SessionState;
  using E = SessionEvent;
  const std::map<std::pair<S, E>, S> expected{
      {{S::NEW, E::phone_submitted}, S::PHONE_SUBMITTED},
      {{S::NEW, E::idle_timeout}, S::EXPIRED},
      {{S::PHONE_SUBMITTED, E::phone_submitted}, S::PHONE_SUBMITTED},
      {{S::PHONE_SUBMITTED, E::code_resent}, S::PHONE_SUBMITTED},
      {{S::PHONE_SUBMITTED, E::otp_verified}, S::OTP_VERIFIED},
      {{S::PHONE_SUBMITTED, E::otp_failed}, S::EXPIRED},
      {{S::PHONE_SUBMITTED, E::idle_timeout}, S::EXPIRED},
      {{S::OTP_VERIFIED, E::consent_recorded}, S::CONSENTED},
      {{S::OTP_VERIFIED, E::idle_timeout}, S::EXPIRED},
      {{S::CONSENTED, E::lease_granted}, S::ONLINE},
      {{S::ONLINE, E::intrusion_detected}, S::QUARANTINED},
      {{S::ONLINE, E::idle_timeout}, S::EXPIRED},
      {{S::QUARANTINED, E::idle_timeout}, S::EXPIRED},
  };
  for (S s : kAllStates) {
    for (E e : kAllEvents) {
      const auto it = expected.find({s, e});
      const auto got = next_state(s, e);
      if (it == expected.end()) {
        CHECK_MESSAGE(!got, to_string(s), " + ", to_string(e));
      } else {
        CHECK_MESSAGE(got == it->second, to_string(s), " + ", to_string(e));
      }
    }
    CHECK(session_state_from_string(to_string(s)) == s);
  }
}

TEST_CASE("full admission flow") {
  GatewayHarness h;
  const auto connected = h.gw->on_connect("aa:bb", t0);
  CHECK(connected.created);
  CHECK(connected.session.state == SessionState::NEW);
  CHECK(connected.redirect == "/portal/?session=" + connected.session.session_id);
  const auto id = connected.session.session_id;

  const auto phone = h.gw->submit_phone(id, "+15550001111", t0 + 1s);
  CHECK(phone.session.state == SessionState::PHONE_SUBMITTED);
  CHECK(phone.challenge.expires_at == t0 + 301s);
  CHECK(phone.session.phone_hash->size() == 64);

  const auto wrong = h.gw->submit_otp(id, h.code("+15550001111") == "000000" ? "111111" : "000000", t0 + 2s);
  CHECK_FALSE(wrong.outcome.verified);
  CHECK(wrong.session.state == SessionState::PHONE_SUBMITTED);

  const auto verified = h.gw->submit_otp(id, h.code("+15550001111"), t0 + 3s);
  CHECK(verified.outcome.verified);
  CHECK(verified.session.state == SessionState::OTP_VERIFIED);

  const auto online = h.gw->accept_policy(id, h.active_ref(), t0 + 4s);
  CHECK(online.state == SessionState::ONLINE);
  REQUIRE(online.lease);
  CHECK(to_string(online.lease->ip) == "10.0.0.2");
  CHECK(online.consent == h.active_ref());

  using K = audit::AuditKind;
  CHECK(kinds(*h.log) == std::vector<K>{K::session_connected, K::otp_requested, K::otp_verified, K::consent_granted,
                                        K::lease_granted, K::session_online});
}

TEST_CASE("reconnect never duplicates or launders a session") {
  GatewayHarness h;
  const auto s = h.admit("dev", "+15550001111", t0);
  const auto again = h.gw->on_connect("dev", t0 + 1s);
  CHECK_FALSE(again.created);
  CHECK(again.session.session_id == s.session_id);
  CHECK(again.session.state == SessionState::ONLINE);

  h.gw->quarantine(s.session_id, {{"reason", "attack window"}}, t0 + 2s);
  const auto after = h.gw->on_connect("dev", t0 + 3s);
  CHECK(after.session.session_id == s.session_id);
  CHECK(after.session.state == SessionState::QUARANTINED);
  CHECK(after.session.quarantine_reason == "attack window");
  CHECK(h.log->count(audit::AuditKind::session_connected) == 1);
}

TEST_CASE("operations in the wrong state are transition errors") {
  GatewayHarness h;
  const auto id = h.gw->on_connect("dev", t0).session.session_id;
  CHECK(kind_of_error([&] { h.gw->submit_otp(id, "123456", t0); }) == ErrorKind::invalid_state);
  CHECK(kind_of_error([&] { h.gw->accept_policy(id, h.active_ref(), t0); }) == ErrorKind::invalid_state);
  CHECK(kind_of_error([&] { h.gw->quarantine(id, {}, t0); }) == ErrorKind::invalid_state);
  CHECK(kind_of_error([&] { h.gw->resend(id, t0); }) == ErrorKind::invalid_state);
  CHECK(kind_of_error([&] { h.gw->record_activity(id, t0); }) == ErrorKind::not_admitted);
  CHECK(kind_of_error([&] { h.gw->get("nope"); }) == ErrorKind::not_found);
  CHECK(kind_of_error([&] { h.gw->submit_phone(id, "12345", t0); }) == ErrorKind::validation);
  CHECK(h.gw->get(id).state == SessionState::NEW);

  const auto s = h.admit("dev2", "+15550002222", t0);
  CHECK(kind_of_error([&] { h.gw->submit_phone(s.session_id, "+15550002222", t0); }) == ErrorKind::invalid_state);
  h.gw->quarantine(s.session_id, {}, t0 + 1s);
  CHECK(kind_of_error([&] { h.gw->quarantine(s.session_id, {}, t0 + 2s); }) == ErrorKind::invalid_state);
}

TEST_CASE("phone resubmission resends and respects the cooldown") {
  GatewayHarness h;
  const auto id = h.gw->on_connect("dev", t0).session.session_id;
  const auto first = h.gw->submit_phone(id, "+15550001111", t0);
  CHECK(kind_of_error([&] { h.gw->submit_phone(id, "+15550001111", t0 + 5s); }) == ErrorKind::rate_limited);
  CHECK(kind_of_error([&] { h.gw->resend(id, t0 + 10s); }) == ErrorKind::rate_limited);
  const auto second = h.gw->resend(id, t0 + 30s);
  CHECK(second.challenge.challenge_id != first.challenge.challenge_id);
  CHECK(second.session.challenge_id == second.challenge.challenge_id);
  CHECK(h.gw->submit_otp(id, h.code("+15550001111"), t0 + 31s).outcome.verified);
}

TEST_CASE("exhausting the code expires the session") {
  GatewayHarness h;
  const auto id = h.gw->on_connect("dev", t0).session.session_id;
  h.gw->submit_phone(id, "+15550001111", t0);
  const std::string bad = h.code("+15550001111") == "000000" ? "111111" : "000000";
  h.gw->submit_otp(id, bad, t0 + 1s);
  h.gw->submit_otp(id, bad, t0 + 2s);
  const auto last = h.gw->submit_otp(id, bad, t0 + 3s);
  CHECK(last.outcome.reason == auth::RejectReason::exhausted);
  CHECK(last.session.state == SessionState::EXPIRED);
  CHECK(h.log->count(audit::AuditKind::session_expired) == 1);

  const auto fresh = h.gw->on_connect("dev", t0 + 4s);
  CHECK(fresh.created);
  CHECK(fresh.session.session_id != id);
}

TEST_CASE("an expired code expires the session") {
  GatewayHarness h;
  const auto id = h.gw->on_connect("dev", t0).session.session_id;
  h.gw->submit_phone(id, "+15550001111", t0);
  const auto r = h.gw->submit_otp(id, h.code("+15550001111"), t0 + 300s);
  CHECK(r.outcome.reason == auth::RejectReason::expired);
  CHECK(r.session.state == SessionState::EXPIRED);
}

TEST_CASE("stale policy versions are refused") {
  GatewayHarness h;
  const auto id = h.gw->on_connect("dev", t0).session.session_id;
  h.gw->submit_phone(id, "+15550001111", t0);
  h.gw->submit_otp(id, h.code("+15550001111"), t0);
  const auto v1 = h.active_ref();
  h.policies->publish(audit::make_policy("network-use", 2, "Terms", "Updated terms."));
  CHECK(kind_of_error([&] { h.gw->accept_policy(id, v1, t0 + 1s); }) == ErrorKind::version_mismatch);
  CHECK(h.gw->get(id).state == SessionState::OTP_VERIFIED);
  CHECK(h.leases->active_leases(t0 + 1s).empty());
  CHECK(h.gw->accept_policy(id, h.active_ref(), t0 + 2s).consent->version == 2);
}

TEST_CASE("pool exhaustion leaves the session verified and a retry succeeds") {
  GatewayHarness h(1);
  const auto first = h.admit("dev1", "+15550000001", t0);
  const auto id = h.gw->on_connect("dev2", t0).session.session_id;
  h.gw->submit_phone(id, "+15550000002", t0);
  h.gw->submit_otp(id, h.code("+15550000002"), t0);
  CHECK(kind_of_error([&] { h.gw->accept_policy(id, h.active_ref(), t0 + 1s); }) == ErrorKind::pool_exhausted);
  CHECK(h.gw->get(id).state == SessionState::OTP_VERIFIED);
  CHECK(h.log->count(audit::AuditKind::consent_granted) == 1);

  h.gw->quarantine(first.session_id, {}, t0 + 2s);
  const auto expired = h.gw->expire_idle(t0 + 1800s + 2s);
  CHECK(expired.size() == 2);
  CHECK(kind_of_error([&] { h.gw->accept_policy(id, h.active_ref(), t0 + 1800s + 3s); }) ==
        ErrorKind::invalid_state);
}

TEST_CASE("consent replay is idempotent") {
  GatewayHarness h(1);
  const auto id = h.gw->on_connect("dev2", t0).session.session_id;
  h.gw->submit_phone(id, "+15550000002", t0);
  h.gw->submit_otp(id, h.code("+15550000002"), t0);
  auto blocker = h.leases->allocate("someone-else", t0);
  CHECK(kind_of_error([&] { h.gw->accept_policy(id, h.active_ref(), t0 + 1s); }) == ErrorKind::pool_exhausted);
  h.leases->release(blocker.lease_id, t0 + 2s);
  const auto a = h.gw->accept_policy(id, h.active_ref(), t0 + 3s);
  const auto b = h.gw->accept_policy(id, h.active_ref(), t0 + 4s);
  CHECK(a.state == SessionState::ONLINE);
  CHECK(b.lease->lease_id == a.lease->lease_id);
  CHECK(h.log->count(audit::AuditKind::consent_granted) == 1);
  CHECK(h.log->count(audit::AuditKind::lease_granted) == 1);
  CHECK(h.log->count(audit::AuditKind::session_online) == 1);
}

TEST_CASE("idle sessions and lapsed leases expire") {
  GatewayHarness h;
  const auto online = h.admit("dev1", "+15550000001", t0);
  const auto waiting = h.gw->on_connect("dev2", t0).session.session_id;

  h.gw->record_activity(online.session_id, t0 + 1000s);
  CHECK(h.gw->expire_idle(t0 + 1799s).empty());
  const auto expired = h.gw->expire_idle(t0 + 1800s);
  CHECK(expired == std::vector<std::string>{waiting});

  // activity renews the lease up to now + 3600 s, so only idleness ends it
  for (int i = 1; i <= 5; ++i) h.gw->record_activity(online.session_id, t0 + 1000s + i * 1000s);
  CHECK(h.gw->expire_idle(t0 + 6000s + 1799s).empty());
  CHECK(h.gw->expire_idle(t0 + 6000s + 1800s) == std::vector<std::string>{online.session_id});
  const auto s = h.gw->get(online.session_id);
  CHECK(s.state == SessionState::EXPIRED);
  CHECK(s.lease->state == LeaseState::released);
  CHECK(h.leases->active_leases(t0 + 7800s).empty());
  CHECK(h.log->count(audit::AuditKind::lease_released) == 1);
}

TEST_CASE("lease expiry ends an online session") {
  auto sms = std::make_shared<auth::MockDispatcher>();
  auto otp = std::make_shared<auth::OtpService>(sms);
  auto leases = std::make_shared<LeasePool>(address_range(parse_ipv4("10.0.0.2"), parse_ipv4("10.0.0.3")), 600s);
  auto policies = std::make_shared<audit::PolicyRegistry>();
  policies->publish(audit::make_policy("network-use", 1, "", "terms"));
  std::shared_ptr<audit::AuditLog> log = audit::AuditLog::in_memory();
  Gateway gw({}, std::make_shared<auth::LocalOtpClient>(otp), leases, policies, log);
  const auto id = gw.on_connect("dev", t0).session.session_id;
  gw.submit_phone(id, "+15550001111", t0);
  gw.submit_otp(id, *sms->last_code("+15550001111"), t0);
  gw.accept_policy(id, audit::ref_of(policies->active("network-use")), t0);
  CHECK(gw.expire_idle(t0 + 600s) == std::vector<std::string>{id});
  CHECK(gw.get(id).lease->state == LeaseState::expired);
}
