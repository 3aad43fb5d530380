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

#include <httplib.h>

#include <atomic>

#include <nlohmann/json.hpp>

#include "edgeguard/common/error.hpp"
#include "edgeguard/http/server.hpp"
#include "gateway_harness.hpp"
#include "scripted_model.hpp"

using namespace edgeguard;
using namespace std::chrono_literals;
using nlohmann::json;

namespace {

struct FakeClock {
  std::shared_ptr<std::atomic<std::int64_t>> ms = std::make_shared<std::atomic<std::int64_t>>(1'700'000'000'000);
  http::Clock fn() const {
    return [ms = ms] { return from_epoch_ms(ms->load()); };
  }
  void advance(Duration d) { *ms += d.count(); }
};

json body(const httplib::Result& r) {
  REQUIRE(r);
  return json::parse(r->body);
}

json post(httplib::Client& c, const std::string& path, const json& j, int expected) {
  auto r = c.Post(path, j.dump(), "application/json");
  REQUIRE(r);
  CHECK_MESSAGE(r->status == expected, path, " ", r->body);
  return json::parse(r->body);
}

// Everything mounted on one listener, OTP in-process.
struct Stack {
  FakeClock clock;
  testing::GatewayHarness h;
  std::shared_ptr<gateway::Gateway> gw;
  std::shared_ptr<monitor::Monitor> mon;
  http::Server server{clock.fn()};
  int port = 0;

  Stack() {
    gw = std::shared_ptr<gateway::Gateway>(h.gw.get(), [](auto*) {});
    mon = std::make_shared<monitor::Monitor>(testing::scripted_model(), monitor::AlertPolicy{}, *h.gw, *h.log);
    server.mount_otp(h.otp);
    server.mount_gateway(gw);
    server.mount_monitor(mon);
    port = server.bind("127.0.0.1", 0);
    server.start();
  }
};

}  // namespace

TEST_CASE("gateway flow over HTTP") {
  Stack st;
  httplib::Client c("127.0.0.1", st.port);

  const json connected = post(c, "/session/connect", {{"device_id", "aa:bb:cc"}}, 201);
  const std::string sid = connected["session"]["session_id"];
  CHECK(connected["session"]["state"] == "NEW");
  CHECK(connected["redirect"] == "/portal/?session=" + sid);
  CHECK(post(c, "/session/connect", {{"device_id", "aa:bb:cc"}}, 200)["session"]["session_id"] == sid);

  const json bad_phone = post(c, "/session/" + sid + "/phone", {{"phone", "12345"}}, 400);
  CHECK(bad_phone["error"] == "validation");

  const json phone = post(c, "/session/" + sid + "/phone", {{"phone", "+15550001111"}}, 200);
  CHECK(phone["session"]["state"] == "PHONE_SUBMITTED");
  CHECK(phone["expires_at"] == 1'700'000'000'000 + 300'000);
  CHECK(phone["resend_available_at"] == 1'700'000'000'000 + 30'000);
  CHECK_FALSE(phone.contains("code"));

  const json limited = post(c, "/session/" + sid + "/resend", json::object(), 429);
  CHECK(limited["error"] == "rate_limited");
  CHECK(limited["retry_at"] == 1'700'000'000'000 + 30'000);

  CHECK(post(c, "/session/" + sid + "/consent", {{"policy_id", "network-use"}, {"version", 1}, {"content_hash", "x"}},
             409)["error"] == "invalid_state");

  const std::string code = st.h.code("+15550001111");
  const json verified = post(c, "/session/" + sid + "/otp", {{"code", code}}, 200);
  CHECK(verified["status"] == "verified");
  CHECK(verified["session"]["state"] == "OTP_VERIFIED");

  const json policy = body(c.Get("/policy/active"));
  CHECK(policy["version"] == 1);
  CHECK(policy["content_hash"].get<std::string>().size() == 64);

  const json stale = post(c, "/session/" + sid + "/consent",
                          {{"policy_id", "network-use"}, {"version", 1}, {"content_hash", std::string(64, '0')}}, 409);
  CHECK(stale["error"] == "version_mismatch");

  const json consent_body{{"policy_id", policy["policy_id"]}, {"version", policy["version"]},
                          {"content_hash", policy["content_hash"]}};
  const json online = post(c, "/session/" + sid + "/consent", consent_body, 200);
  CHECK(online["session"]["state"] == "ONLINE");
  CHECK(online["session"]["lease"]["ip"] == "10.0.0.2");
  CHECK(post(c, "/session/" + sid + "/consent", consent_body, 200)["session"]["state"] == "ONLINE");
  CHECK(st.h.log->count(audit::AuditKind::consent_granted) == 1);

  const json polled = body(c.Get("/session/" + sid));
  CHECK(polled["session"]["state"] == "ONLINE");
  auto missing = c.Get("/session/ffff");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(json::parse(missing->body)["error"] == "not_found");

  auto malformed = c.Post("/session/connect", "{nope", "application/json");
  REQUIRE(malformed);
  CHECK(malformed->status == 400);
}

TEST_CASE("ingest and stats over HTTP") {
  Stack st;
  const auto s = st.h.admit("dev", "+15550001111", from_epoch_ms(st.clock.ms->load()));
  httplib::Client c("127.0.0.1", st.port);

  std::string lines;
  for (int i = 0; i < 5; ++i) {
    lines += monitor::format_flow_line(
        {s.session_id, from_epoch_ms(st.clock.ms->load() + i), testing::scripted_record(testing::Scripted::attack)});
    lines += '\n';
  }
  lines += "{garbage\n";
  lines += monitor::format_flow_line({"nobody", from_epoch_ms(st.clock.ms->load()),
                                      testing::scripted_record(testing::Scripted::normal)}) + "\n";
  auto r = c.Post("/ingest", lines, "application/x-ndjson");
  REQUIRE(r);
  CHECK(r->status == 200);
  const json out = json::parse(r->body);
  CHECK(out["accepted"] == 5);
  CHECK(out["results"][4]["action"] == "quarantine");
  CHECK(out["results"][5]["error"] == "parse");
  CHECK(out["results"][6]["error"] == "not_found");

  const json stats = body(c.Get("/stats"));
  CHECK(stats["events_processed"] == 5);
  CHECK(stats["quarantines"] == 1);
  CHECK(stats["parse_errors"] == 1);
  CHECK(stats["rejected"] == 1);
  CHECK(body(c.Get("/session/" + s.session_id))["session"]["state"] == "QUARANTINED");

  auto empty = c.Post("/ingest", "", "application/x-ndjson");
  REQUIRE(empty);
  CHECK(empty->status == 400);
}

TEST_CASE("OTP service over HTTP and the remote client") {
  FakeClock clock;
  auto sms = std::make_shared<auth::MockDispatcher>();
  auto otp = std::make_shared<auth::OtpService>(sms);
  http::Server server(clock.fn());
  server.mount_otp(otp);
  const int port = server.bind("127.0.0.1", 0);
  server.start();

  http::HttpOtpClient client("http://127.0.0.1:" + std::to_string(port));
  const auto now = from_epoch_ms(clock.ms->load());
  const auto ticket = client.request("+15550001111", now);
  CHECK(ticket.expires_at == now + 300s);

  try {
    client.request("+15550001111", now);
    FAIL("expected rate limit");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::rate_limited);
    CHECK(e.retry_at() == now + 30s);
  }
  try {
    client.request("555", now);
    FAIL("expected validation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::validation);
  }

  const auto wrong = client.verify(ticket.challenge_id, *sms->last_code("+15550001111") == "000000" ? "111111" : "000000", now);
  CHECK(wrong.reason == auth::RejectReason::invalid_code);
  CHECK(wrong.attempts_remaining == 2);
  CHECK(client.verify(ticket.challenge_id, *sms->last_code("+15550001111"), now).verified);
  try {
    client.resend(ticket.challenge_id, now);
    FAIL("expected state error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_state);
  }
  try {
    client.verify("unknown", "123456", now);
    FAIL("expected not found");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::not_found);
  }

  // a gateway can use the remote service as its OTP backend
  testing::GatewayHarness h;
  gateway::GatewayConfig cfg;
  cfg.phone_salt = "s";
  gateway::Gateway gw(cfg, std::make_shared<http::HttpOtpClient>("http://127.0.0.1:" + std::to_string(port)), h.leases,
                      h.policies, h.log);
  const auto sid = gw.on_connect("dev", now).session.session_id;
  gw.submit_phone(sid, "+15550002222", now);
  CHECK(gw.submit_otp(sid, *sms->last_code("+15550002222"), now).session.state == gateway::SessionState::OTP_VERIFIED);

  server.stop();
  http::HttpOtpClient dead("http://127.0.0.1:" + std::to_string(port));
  try {
    dead.request("+15550003333", now);
    FAIL("expected delivery error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::delivery);
  }
}
