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


#include "edgeguard/http/server.hpp"

#include <httplib.h>

#include <filesystem>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "edgeguard/common/error.hpp"
#include "edgeguard/common/log.hpp"

namespace edgeguard::http {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
  json body{{"error", to_string(e.kind())}, {"message", e.what()}};
  if (e.retry_at()) body["retry_at"] = to_epoch_ms(*e.retry_at());
  send_json(res, http_status(e.kind()), body);
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    json j = json::parse(req.body);
    if (!j.is_object()) throw Error(ErrorKind::validation, "request body must be a JSON object");
    return j;
  } catch (const json::exception&) {
    throw Error(ErrorKind::validation, "request body is not valid JSON");
  }
}

std::string string_field(const json& body, const char* name) {
  auto it = body.find(name);
  if (it == body.end() || !it->is_string()) {
    throw Error(ErrorKind::validation, std::string("missing string field '") + name + "'");
  }
  return it->get<std::string>();
}

// Runs a handler and turns every failure into a JSON error response.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const std::exception& e) {
      log::error(std::string("request failed: ") + e.what());
      send_error(res, Error(ErrorKind::storage, "internal error"));
    }
  };
}

json ticket_json(const auth::ChallengeTicket& t) {
  return {{"challenge_id", t.challenge_id},
          {"expires_at", to_epoch_ms(t.expires_at)},
          {"resend_available_at", to_epoch_ms(t.resend_available_at)}};
}

json outcome_json(const auth::VerifyOutcome& o) {
  json j{{"status", o.verified ? "verified" : "rejected"}, {"attempts_remaining", o.attempts_remaining}};
  if (o.reason) j["reason"] = auth::to_string(*o.reason);
  return j;
}

json session_json(const gateway::Session& s) {
  json j{{"session_id", s.session_id},
         {"device_id", s.device_id},
         {"state", gateway::to_string(s.state)},
         {"created_at", to_epoch_ms(s.created_at)},
         {"last_activity", to_epoch_ms(s.last_activity)}};
  if (s.consent) j["consent"] = {{"policy_id", s.consent->policy_id}, {"version", s.consent->version}};
  if (s.lease) {
    j["lease"] = {{"ip", gateway::to_string(s.lease->ip)},
                  {"expires_at", to_epoch_ms(s.lease->expires_at)},
                  {"state", gateway::to_string(s.lease->state)}};
  }
  if (s.quarantine_reason) j["quarantine_reason"] = *s.quarantine_reason;
  return j;
}

json stats_json(const monitor::PipelineStats& st) {
  json sessions = json::object();
  for (const auto& [id, c] : st.sessions) {
    sessions[id] = {{"events", c.events}, {"attacks", c.attacks}, {"alerts", c.alerts}, {"quarantines", c.quarantines}};
  }
  return {{"events_processed", st.events_processed},
          {"attacks_flagged", st.attacks_flagged},
          {"alerts", st.alerts},
          {"quarantines", st.quarantines},
          {"parse_errors", st.parse_errors},
          {"rejected", st.rejected},
          {"sessions", sessions}};
}

}  // namespace

struct Server::Impl {
  httplib::Server server;
  std::thread thread;
};

Server::Server(Clock clock) : impl_(std::make_unique<Impl>()), clock_(std::move(clock)) {
  impl_->server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
    log::info(req.method + " " + req.path + " " + std::to_string(res.status));
  });
}

Server::~Server() { stop(); }

void Server::mount_otp(std::shared_ptr<auth::OtpService> otp) {
  auto& s = impl_->server;
  auto clock = clock_;
  s.Post("/otp/request", guarded([otp, clock](const httplib::Request& req, httplib::Response& res) {
           const json body = parse_body(req);
           send_json(res, 200, ticket_json(auth::ticket_of(otp->request(string_field(body, "phone"), clock()))));
         }));
  s.Post("/otp/verify", guarded([otp, clock](const httplib::Request& req, httplib::Response& res) {
           const json body = parse_body(req);
           const auto outcome =
               otp->verify(string_field(body, "challenge_id"), string_field(body, "code"), clock());
           send_json(res, 200, outcome_json(outcome));
         }));
  s.Post("/otp/resend", guarded([otp, clock](const httplib::Request& req, httplib::Response& res) {
           const json body = parse_body(req);
           send_json(res, 200, ticket_json(auth::ticket_of(otp->resend(string_field(body, "challenge_id"), clock()))));
         }));
}

void Server::mount_gateway(std::shared_ptr<gateway::Gateway> gw) {
  auto& s = impl_->server;
  auto clock = clock_;
  s.Post("/session/connect", guarded([gw, clock](const httplib::Request& req, httplib::Response& res) {
           const json body = parse_body(req);
           const auto r = gw->on_connect(string_field(body, "device_id"), clock());
           send_json(res, r.created ? 201 : 200,
                     {{"session", session_json(r.session)}, {"redirect", r.redirect}, {"created", r.created}});
         }));
  s.Post(R"(/session/([^/]+)/phone)", guarded([gw, clock](const httplib::Request& req, httplib::Response& res) {
           const json body = parse_body(req);
           const auto r = gw->submit_phone(req.matches[1].str(), string_field(body, "phone"), clock());
           send_json(res, 200,
                     {{"session", session_json(r.session)},
                      {"expires_at", to_epoch_ms(r.challenge.expires_at)},
                      {"resend_available_at", to_epoch_ms(r.challenge.resend_available_at)}});
         }));
  s.Post(R"(/session/([^/]+)/resend)", guarded([gw, clock](const httplib::Request& req, httplib::Response& res) {
           const auto r = gw->resend(req.matches[1].str(), clock());
           send_json(res, 200,
                     {{"session", session_json(r.session)},
                      {"expires_at", to_epoch_ms(r.challenge.expires_at)},
                      {"resend_available_at", to_epoch_ms(r.challenge.resend_available_at)}});
         }));
  s.Post(R"(/session/([^/]+)/otp)", guarded([gw, clock](const httplib::Request& req, httplib::Response& res) {
           const json body = parse_body(req);
           const auto r = gw->submit_otp(req.matches[1].str(), string_field(body, "code"), clock());
           json out = outcome_json(r.outcome);
           out["session"] = session_json(r.session);
           send_json(res, 200, out);
         }));
  s.Post(R"(/session/([^/]+)/consent)", guarded([gw, clock](const httplib::Request& req, httplib::Response& res) {
           const json body = parse_body(req);
           audit::PolicyRef ref;
           ref.policy_id = string_field(body, "policy_id");
           ref.content_hash = string_field(body, "content_hash");
           const auto v = body.find("version");
           if (v == body.end() || !v->is_number_unsigned()) {
             throw Error(ErrorKind::validation, "missing integer field 'version'");
           }
           ref.version = v->get<std::uint32_t>();
           send_json(res, 200, {{"session", session_json(gw->accept_policy(req.matches[1].str(), ref, clock()))}});
         }));
  s.Get(R"(/session/([^/]+))", guarded([gw](const httplib::Request& req, httplib::Response& res) {
          send_json(res, 200, {{"session", session_json(gw->get(req.matches[1].str()))}});
        }));
  s.Get("/policy/active", guarded([gw](const httplib::Request&, httplib::Response& res) {
          const auto p = gw->active_policy();
          send_json(res, 200,
                    {{"policy_id", p.policy_id},
                     {"version", p.version},
                     {"title", p.title},
                     {"text", p.text},
                     {"content_hash", p.content_hash}});
        }));
}

void Server::mount_monitor(std::shared_ptr<monitor::Monitor> mon) {
  auto& s = impl_->server;
  s.Post("/ingest", guarded([mon](const httplib::Request& req, httplib::Response& res) {
           json results = json::array();
           std::istringstream in(req.body);
           std::string line;
           std::size_t line_no = 0;
           std::size_t accepted = 0;
           while (std::getline(in, line)) {
             ++line_no;
             if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
             try {
               const auto r = mon->ingest_line(line, line_no);
               ++accepted;
               results.push_back({{"line", line_no},
                                  {"verdict", r.verdict == dataset::TrafficClass::attack ? "attack" : "normal"},
                                  {"confidence", r.confidence},
                                  {"action", monitor::to_string(r.action)},
                                  {"attacks_in_window", r.attacks_in_window}});
             } catch (const dataset::ParseError& e) {
               results.push_back({{"line", line_no}, {"error", "parse"}, {"message", e.what()}});
             } catch (const Error& e) {
               results.push_back({{"line", line_no}, {"error", to_string(e.kind())}, {"message", e.what()}});
             }
           }
           if (line_no == 0) throw Error(ErrorKind::validation, "empty ingest body");
           send_json(res, 200, {{"accepted", accepted}, {"results", results}});
         }));
  s.Get("/stats", guarded([mon](const httplib::Request&, httplib::Response& res) {
          send_json(res, 200, stats_json(mon->stats()));
        }));
}

bool Server::mount_portal(const std::string& dir) {
  if (!std::filesystem::is_directory(dir)) return false;
  return impl_->server.set_mount_point("/portal", dir);
}

int Server::bind(const std::string& host, int port) {
  const bool ok = port == 0 ? (port_ = impl_->server.bind_to_any_port(host)) > 0
                            : impl_->server.bind_to_port(host, port) && (port_ = port) > 0;
  if (!ok) throw Error(ErrorKind::storage, "cannot bind " + host + ":" + std::to_string(port));
  return port_;
}

void Server::start() {
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  while (!impl_->server.is_running()) std::this_thread::sleep_for(std::chrono::milliseconds(1));
}

void Server::run() { impl_->server.listen_after_bind(); }

void Server::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

struct HttpOtpClient::Impl {
  explicit Impl(const std::string& url) : client(url) {
    client.set_connection_timeout(5);
    client.set_read_timeout(10);
  }
  std::mutex mu;
  httplib::Client client;

  json post(const std::string& path, const json& body) {
    std::lock_guard lock(mu);
    auto res = client.Post(path, body.dump(), "application/json");
    if (!res) throw Error(ErrorKind::delivery, "OTP service unreachable: " + httplib::to_string(res.error()));
    json j;
    try {
      j = json::parse(res->body);
    } catch (const json::exception&) {
      throw Error(ErrorKind::delivery, "OTP service sent a malformed response");
    }
    if (res->status != 200) {
      const auto kind = error_kind_from_string(j.value("error", ""));
      std::optional<Timestamp> retry;
      if (j.contains("retry_at")) retry = from_epoch_ms(j["retry_at"].get<std::int64_t>());
      throw Error(kind.value_or(ErrorKind::delivery), j.value("message", "OTP service error"), retry);
    }
    return j;
  }

  static auth::ChallengeTicket ticket(const json& j) {
    return {j.at("challenge_id").get<std::string>(), from_epoch_ms(j.at("expires_at").get<std::int64_t>()),
            from_epoch_ms(j.at("resend_available_at").get<std::int64_t>())};
  }
};

HttpOtpClient::HttpOtpClient(std::string base_url) : impl_(std::make_unique<Impl>(base_url)) {}
HttpOtpClient::~HttpOtpClient() = default;

auth::ChallengeTicket HttpOtpClient::request(std::string_view phone, Timestamp) {
  return Impl::ticket(impl_->post("/otp/request", {{"phone", phone}}));
}

auth::VerifyOutcome HttpOtpClient::verify(std::string_view challenge_id, std::string_view code, Timestamp) {
  const json j = impl_->post("/otp/verify", {{"challenge_id", challenge_id}, {"code", code}});
  auth::VerifyOutcome out;
  out.verified = j.at("status") == "verified";
  out.attempts_remaining = j.value("attempts_remaining", 0u);
  if (j.contains("reason")) {
    const std::string r = j["reason"].get<std::string>();
    for (auto reason : {auth::RejectReason::invalid_code, auth::RejectReason::expired, auth::RejectReason::exhausted,
                        auth::RejectReason::already_used}) {
      if (auth::to_string(reason) == r) out.reason = reason;
    }
  }
  return out;
}

auth::ChallengeTicket HttpOtpClient::resend(std::string_view challenge_id, Timestamp) {
  return Impl::ticket(impl_->post("/otp/resend", {{"challenge_id", challenge_id}}));
}

}  // namespace edgeguard::http
