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

#include <array>
#include <random>
#include <memory>
#include <set>
#include <sstream>

#include "edgeguard/auth/client.hpp"
#include "edgeguard/auth/dispatcher.hpp"
#include "edgeguard/auth/otp.hpp"
#include "edgeguard/common/error.hpp"

using namespace edgeguard;
using namespace edgeguard::auth;
using namespace std::chrono_literals;

namespace {

const Timestamp t0 = from_epoch_ms(1'700'000'000'000);
constexpr std::string_view kPhone = "+15550001111";

struct Fixture {
  std::shared_ptr<MockDispatcher> sms = std::make_shared<MockDispatcher>();
  OtpService otp{sms};

  std::string code_for(std::string_view phone = kPhone) { return sms->last_code(phone).value(); }
};

std::string wrong_code(const std::string& code) {
  std::string w = code;
  w[0] = w[0] == '9' ? '0' : static_cast<char>(w[0] + 1);
  return w;
}

ErrorKind kind_of_error(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an edgeguard::Error");
  return ErrorKind::storage;
}

}  // namespace

TEST_CASE("phone numbers must be E.164 shaped") {
  CHECK(is_e164("+15550001111"));
  CHECK(is_e164("+12345678"));
  CHECK(is_e164("+123456789012345"));
  CHECK_FALSE(is_e164("12345"));
  CHECK_FALSE(is_e164("+1234567"));
  CHECK_FALSE(is_e164("+1234567890123456"));
  CHECK_FALSE(is_e164("+1 555 000 1111"));
  CHECK_FALSE(is_e164("+1555-0001111"));
  CHECK_FALSE(is_e164(""));
  CHECK(kind_of_error([] { PhoneNumber::parse("12345"); }) == ErrorKind::validation);
}

TEST_CASE("a fresh challenge has the default budget and ttl") {
  Fixture f;
  const OtpChallenge c = f.otp.request(kPhone, t0);
  CHECK(c.attempts_remaining == 3);
  CHECK(c.expires_at - c.created_at == 300s);
  CHECK(c.resend_available_at == t0 + 30s);
  CHECK(c.state == ChallengeState::pending);
  CHECK(c.challenge_id.size() == 32);
  REQUIRE(f.sms->outbox().size() == 1);
  CHECK(f.sms->outbox()[0].to == kPhone);
  CHECK(f.code_for().size() == 6);
}

TEST_CASE("request validates the phone") {
  Fixture f;
  CHECK(kind_of_error([&] { f.otp.request("12345", t0); }) == ErrorKind::validation);
  CHECK(f.sms->outbox().empty());
}

TEST_CASE("a second request inside the cooldown is rate limited") {
  Fixture f;
  f.otp.request(kPhone, t0);
  try {
    f.otp.request(kPhone, t0 + 5s);
    FAIL("expected rate limit");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::rate_limited);
    REQUIRE(e.retry_at());
    CHECK(*e.retry_at() == t0 + 30s);
  }
  CHECK(f.sms->outbox().size() == 1);
}

TEST_CASE("a request after the cooldown replaces the pending challenge") {
  Fixture f;
  const auto first = f.otp.request(kPhone, t0);
  const auto second = f.otp.request(kPhone, t0 + 30s);
  CHECK(first.challenge_id != second.challenge_id);
  CHECK(f.otp.pending_count(kPhone, t0 + 30s) == 1);
  CHECK_FALSE(f.otp.find(first.challenge_id));
  CHECK(kind_of_error([&] { f.otp.verify(first.challenge_id, "000000", t0 + 31s); }) == ErrorKind::not_found);
}

TEST_CASE("the correct code verifies exactly once") {
  Fixture f;
  const auto c = f.otp.request(kPhone, t0);
  const auto ok = f.otp.verify(c.challenge_id, f.code_for(), t0 + 10s);
  CHECK(ok.verified);
  CHECK_FALSE(ok.reason);
  CHECK(f.otp.find(c.challenge_id)->state == ChallengeState::verified);

  const auto again = f.otp.verify(c.challenge_id, f.code_for(), t0 + 11s);
  CHECK_FALSE(again.verified);
  CHECK(again.reason == RejectReason::already_used);
  CHECK(f.otp.pending_count(kPhone, t0 + 11s) == 0);
}

TEST_CASE("three wrong codes exhaust the challenge") {
  Fixture f;
  const auto c = f.otp.request(kPhone, t0);
  const std::string bad = wrong_code(f.code_for());

  auto r1 = f.otp.verify(c.challenge_id, bad, t0 + 1s);
  CHECK(r1.reason == RejectReason::invalid_code);
  CHECK(r1.attempts_remaining == 2);
  auto r2 = f.otp.verify(c.challenge_id, bad, t0 + 2s);
  CHECK(r2.reason == RejectReason::invalid_code);
  CHECK(r2.attempts_remaining == 1);
  auto r3 = f.otp.verify(c.challenge_id, bad, t0 + 3s);
  CHECK(r3.reason == RejectReason::exhausted);
  CHECK(r3.attempts_remaining == 0);

  auto late = f.otp.verify(c.challenge_id, f.code_for(), t0 + 4s);
  CHECK_FALSE(late.verified);
  CHECK(late.reason == RejectReason::exhausted);
  CHECK(f.otp.find(c.challenge_id)->state == ChallengeState::exhausted);
}

TEST_CASE("expiry is closed at expires_at") {
  Fixture f;
  const auto c = f.otp.request(kPhone, t0);
  SUBCASE("one millisecond before") {
    CHECK(f.otp.verify(c.challenge_id, f.code_for(), c.expires_at - 1ms).verified);
  }
  SUBCASE("exactly at expiry") {
    const auto r = f.otp.verify(c.challenge_id, f.code_for(), c.expires_at);
    CHECK_FALSE(r.verified);
    CHECK(r.reason == RejectReason::expired);
    CHECK(f.otp.find(c.challenge_id)->state == ChallengeState::expired);
  }
}

TEST_CASE("verify rejects unknown ids and malformed codes") {
  Fixture f;
  const auto c = f.otp.request(kPhone, t0);
  CHECK(kind_of_error([&] { f.otp.verify("nope", "123456", t0); }) == ErrorKind::not_found);
  CHECK(kind_of_error([&] { f.otp.verify(c.challenge_id, "12345", t0); }) == ErrorKind::validation);
  CHECK(kind_of_error([&] { f.otp.verify(c.challenge_id, "12345a", t0); }) == ErrorKind::validation);
  CHECK(f.otp.find(c.challenge_id)->attempts_remaining == 3);
}

TEST_CASE("resend issues a new challenge with a fresh budget") {
  Fixture f;
  const auto c = f.otp.request(kPhone, t0);
  f.otp.verify(c.challenge_id, wrong_code(f.code_for()), t0 + 1s);

  CHECK(kind_of_error([&] { f.otp.resend(c.challenge_id, t0 + 10s); }) == ErrorKind::rate_limited);

  const auto n = f.otp.resend(c.challenge_id, t0 + 30s);
  CHECK(n.challenge_id != c.challenge_id);
  CHECK(n.attempts_remaining == 3);
  CHECK(n.resend_available_at == t0 + 60s);
  CHECK(n.expires_at == t0 + 330s);
  CHECK_FALSE(f.otp.find(c.challenge_id));
  CHECK(f.otp.pending_count(kPhone, t0 + 30s) == 1);
  CHECK(f.otp.verify(n.challenge_id, f.code_for(), t0 + 31s).verified);
}

TEST_CASE("resend on a settled challenge is a state error") {
  Fixture f;
  const auto c = f.otp.request(kPhone, t0);
  f.otp.verify(c.challenge_id, f.code_for(), t0 + 1s);
  CHECK(kind_of_error([&] { f.otp.resend(c.challenge_id, t0 + 60s); }) == ErrorKind::invalid_state);
  CHECK(kind_of_error([&] { f.otp.resend("missing", t0 + 60s); }) == ErrorKind::not_found);
}

TEST_CASE("an expired challenge can be resent") {
  Fixture f;
  const auto c = f.otp.request(kPhone, t0);
  const auto n = f.otp.resend(c.challenge_id, c.expires_at + 1s);
  CHECK(n.state == ChallengeState::pending);
  CHECK(f.otp.verify(n.challenge_id, f.code_for(), c.expires_at + 2s).verified);
}

TEST_CASE("resending an old id respects the cooldown of its replacement") {
  Fixture f;
  const auto a = f.otp.request(kPhone, t0);
  const auto b = f.otp.request(kPhone, t0 + 40s);
  // a was voided by the second request
  CHECK(kind_of_error([&] { f.otp.resend(a.challenge_id, t0 + 45s); }) == ErrorKind::not_found);
  CHECK(kind_of_error([&] { f.otp.resend(b.challenge_id, t0 + 45s); }) == ErrorKind::rate_limited);
}

TEST_CASE("delivery failure stores nothing") {
  Fixture f;
  f.sms->fail_deliveries(true);
  CHECK(kind_of_error([&] { f.otp.request(kPhone, t0); }) == ErrorKind::delivery);
  CHECK(f.otp.pending_count(kPhone, t0) == 0);
  f.sms->fail_deliveries(false);
  CHECK_NOTHROW(f.otp.request(kPhone, t0 + 1s));
}

TEST_CASE("a failed resend voids the old challenge") {
  Fixture f;
  const auto c = f.otp.request(kPhone, t0);
  f.sms->fail_deliveries(true);
  CHECK(kind_of_error([&] { f.otp.resend(c.challenge_id, t0 + 30s); }) == ErrorKind::delivery);
  CHECK(f.otp.pending_count(kPhone, t0 + 30s) == 0);
}

TEST_CASE("at most one pending challenge per phone under random operations") {
  Fixture f;
  std::mt19937_64 rng(7);
  const std::array<std::string, 3> phones{"+15550000001", "+15550000002", "+15550000003"};
  std::vector<std::string> ids;
  Timestamp now = t0;
  for (int step = 0; step < 3000; ++step) {
    now += Duration{static_cast<std::int64_t>(rng() % 20'000)};
    const auto& phone = phones[rng() % phones.size()];
    try {
      switch (rng() % 4) {
        case 0: ids.push_back(f.otp.request(phone, now).challenge_id); break;
        case 1:
          if (!ids.empty()) ids.push_back(f.otp.resend(ids[rng() % ids.size()], now).challenge_id);
          break;
        case 2:
          if (!ids.empty()) f.otp.verify(ids[rng() % ids.size()], wrong_code(f.sms->last_code(phone).value_or("000000")), now);
          break;
        default:
          if (!ids.empty()) {
            const auto& id = ids[rng() % ids.size()];
            if (auto c = f.otp.find(id)) f.otp.verify(id, f.code_for(c->phone.e164()), now);
          }
      }
    } catch (const Error&) {
    }
    for (const auto& p : phones) REQUIRE(f.otp.pending_count(p, now) <= 1);
  }
}

TEST_CASE("purge_stale drops settled challenges only") {
  Fixture f;
  const auto a = f.otp.request("+15550000001", t0);
  const auto b = f.otp.request("+15550000002", t0);
  f.otp.verify(a.challenge_id, f.code_for("+15550000001"), t0 + 1s);
  CHECK(f.otp.purge_stale(t0 + 599s) == 0);
  CHECK(f.otp.purge_stale(t0 + 600s) == 2);
  CHECK_FALSE(f.otp.find(a.challenge_id));
  CHECK_FALSE(f.otp.find(b.challenge_id));
}

TEST_CASE("generated codes are uniform over digits") {
  constexpr int kCodes = 10'000;
  std::array<int, 10> freq{};
  for (int i = 0; i < kCodes; ++i) {
    const std::string code = generate_code();
    REQUIRE(code.size() == 6);
    for (char ch : code) {
      REQUIRE((ch >= '0' && ch <= '9'));
      ++freq[ch - '0'];
    }
  }
  const double expected = kCodes * 6 / 10.0;
  double chi2 = 0;
  for (int n : freq) chi2 += (n - expected) * (n - expected) / expected;
  // chi-square upper 0.001 quantile, 9 degrees of freedom
  CHECK(chi2 < 27.877164871256568);
}

TEST_CASE("extract_code and dispatcher output") {
  CHECK(extract_code("Your EdgeGuard verification code is 042917. It expires in 5 min.") == "042917");
  CHECK_FALSE(extract_code("code 12345 only"));
  CHECK_FALSE(extract_code("1234567"));
  CHECK(extract_code("1234567 then 654321") == "654321");

  std::ostringstream out;
  ConsoleDispatcher console(out);
  CHECK(console.send(PhoneNumber::parse(kPhone), "hello 123456").delivered);
  CHECK(out.str() == "SMS to=+15550001111 body=hello 123456\n");
}

TEST_CASE("local client mirrors the service") {
  auto sms = std::make_shared<MockDispatcher>();
  auto service = std::make_shared<OtpService>(sms);
  LocalOtpClient client(service);
  const auto t = client.request(kPhone, t0);
  CHECK(t.expires_at == t0 + 300s);
  CHECK(client.verify(t.challenge_id, *sms->last_code(kPhone), t0 + 1s).verified);
  CHECK(kind_of_error([&] { client.resend(t.challenge_id, t0 + 40s); }) == ErrorKind::invalid_state);
}
