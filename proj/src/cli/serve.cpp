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


#include <pthread.h>
#include <signal.h>

#include <condition_variable>
#include <iostream>
#include <mutex>
#include <thread>

#include "edgeguard/audit/audit_log.hpp"
#include "edgeguard/audit/policy.hpp"
#include "edgeguard/auth/dispatcher.hpp"
#include "edgeguard/classifier/model_io.hpp"
#include "edgeguard/cli/commands.hpp"
#include "edgeguard/common/error.hpp"
#include "edgeguard/common/log.hpp"
#include "edgeguard/gateway/gateway.hpp"
#include "edgeguard/http/server.hpp"
#include "edgeguard/monitor/monitor.hpp"

namespace edgeguard::cli {

namespace {

std::shared_ptr<auth::SmsDispatcher> make_dispatcher(const std::string& kind) {
  if (kind == "console") return std::make_shared<auth::ConsoleDispatcher>(std::cout);
  if (kind == "mock") return std::make_shared<auth::MockDispatcher>();
  return std::make_shared<auth::FileDispatcher>(kind.substr(5));
}

// Runs `fn` every `period` until stopped.
class Ticker {
 public:
  template <typename Fn>
  Ticker(std::chrono::milliseconds period, Fn fn)
      : thread_([this, period, fn] {
          std::unique_lock lock(mu_);
          while (!cv_.wait_for(lock, period, [this] { return stopping_; })) {
            lock.unlock();
            fn();
            lock.lock();
          }
        }) {}
  ~Ticker() {
    {
      std::lock_guard lock(mu_);
      stopping_ = true;
    }
    cv_.notify_all();
    thread_.join();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  bool stopping_ = false;
  std::thread thread_;
};

}  // namespace

int cmd_serve(const Config& config, std::ostream& out) {
  require_model_file(config);
  if (!config.listen_gateway) throw Error(ErrorKind::validation, "config listen.gateway: required for serve");

  // Block the stop signals before any thread starts so only sigwait sees them.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  auto model = std::make_shared<const classifier::Model>(classifier::load_model(config.model_path));
  std::shared_ptr<audit::AuditLog> log = audit::AuditLog::open_file(config.audit_log);
  const auto policy = audit::load_policy_file(config.policy_file);
  auto policies = std::make_shared<audit::PolicyRegistry>();
  policies->publish(policy);

  auto otp = std::make_shared<auth::OtpService>(make_dispatcher(config.sms_dispatcher), config.otp);
  std::shared_ptr<auth::OtpClient> otp_client;
  if (config.otp_service_url.empty()) {
    otp_client = std::make_shared<auth::LocalOtpClient>(otp);
  } else {
    otp_client = std::make_shared<http::HttpOtpClient>(config.otp_service_url);
  }

  auto leases = std::make_shared<gateway::LeasePool>(gateway::pool_addresses(config.pool_cidr, config.pool_exclude),
                                                     std::chrono::seconds(config.lease_seconds));
  gateway::GatewayConfig gcfg;
  gcfg.idle_timeout = std::chrono::seconds(config.idle_seconds);
  gcfg.policy_id = policy.policy_id;
  gcfg.phone_salt = config.phone_salt;
  auto gw = std::make_shared<gateway::Gateway>(gcfg, otp_client, leases, policies, log);
  auto mon = std::make_shared<monitor::Monitor>(model, config.alert, *gw, *log);

  std::unique_ptr<http::Server> otp_server;
  if (config.listen_otp) {
    otp_server = std::make_unique<http::Server>();
    otp_server->mount_otp(otp);
    const int port = otp_server->bind(config.listen_otp->host, config.listen_otp->port);
    otp_server->start();
    out << "otp service listening on http://" << config.listen_otp->host << ':' << port << std::endl;
  }
  http::Server server;
  if (!config.listen_otp) server.mount_otp(otp);
  server.mount_gateway(gw);
  server.mount_monitor(mon);
  if (!config.portal_dir.empty() && !server.mount_portal(config.portal_dir)) {
    log::warn("portal directory " + config.portal_dir + " not found; /portal is not served");
  }
  const int port = server.bind(config.listen_gateway->host, config.listen_gateway->port);
  server.start();
  out << "gateway listening on http://" << config.listen_gateway->host << ':' << port << std::endl;

  {
    Ticker janitor(std::chrono::seconds(5), [&] {
      try {
        const auto now = wall_clock_now();
        for (const auto& id : gw->expire_idle(now)) log::info("session " + id + " expired");
        otp->purge_stale(now);
      } catch (const std::exception& e) {
        log::error(std::string("expiry sweep failed: ") + e.what());
      }
    });
    int sig = 0;
    sigwait(&stop_signals, &sig);
    log::info("signal " + std::to_string(sig) + " received; shutting down");
  }
  server.stop();
  if (otp_server) otp_server->stop();
  out << "stopped; audit log " << config.audit_log << " holds " << log->size() << " events" << std::endl;
  return kExitOk;
}

}  // namespace edgeguard::cli
