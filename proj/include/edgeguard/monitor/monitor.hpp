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

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "edgeguard/audit/audit_log.hpp"
#include "edgeguard/classifier/forest.hpp"
#include "edgeguard/dataset/nslkdd.hpp"
#include "edgeguard/gateway/gateway.hpp"

namespace edgeguard::monitor {

struct AlertPolicy {
  std::uint32_t window = 10;
  std::uint32_t threshold = 5;
  double min_confidence = 0.6;

  // Throws Error(validation) unless 1 <= threshold <= window and
  // min_confidence is in [0, 1].
  void validate() const;
};

struct FlowEvent {
  std::string session_id;
  Timestamp timestamp;
  dataset::ConnectionRecord record;  // the label, if any, is ignored
};

// One JSON object per line: {"session_id":..,"timestamp":<epoch ms>,
// "record":"<41 comma-separated NSL-KDD fields>"}. "record" may also be a
// JSON array of the 41 field values. Throws dataset::ParseError.
FlowEvent parse_flow_line(std::string_view line, std::size_t line_number = 1);
std::string format_flow_line(const FlowEvent& event);

enum class Action { none, alert, quarantine };
std::string_view to_string(Action a) noexcept;

struct IngestResult {
  dataset::TrafficClass verdict = dataset::TrafficClass::normal;
  double confidence = 0.0;
  Action action = Action::none;
  std::uint32_t attacks_in_window = 0;
};

struct SessionCounters {
  std::uint64_t events = 0;
  std::uint64_t attacks = 0;
  std::uint64_t alerts = 0;
  std::uint64_t quarantines = 0;
};

struct PipelineStats {
  std::uint64_t events_processed = 0;
  std::uint64_t attacks_flagged = 0;
  std::uint64_t alerts = 0;
  std::uint64_t quarantines = 0;
  std::uint64_t parse_errors = 0;
  std::uint64_t rejected = 0;  // unknown or not-admitted sessions
  std::map<std::string, SessionCounters> sessions;
};

// Classifies flow records per session and applies the alert policy. Each
// session keeps a ring of its last `window` outcomes; an outcome counts when
// the verdict is attack with confidence >= min_confidence. When the count
// reaches `threshold` on an ONLINE session the gateway quarantines it; a
// counted attack on a QUARANTINED session only raises an alert. Events of
// one session are processed in arrival order.
class Monitor {
 public:
  Monitor(std::shared_ptr<const classifier::Model> model, AlertPolicy policy, gateway::Gateway& gateway,
          audit::AuditLog& log);

  // Errors: not_found (unknown session), not_admitted (session not ONLINE or
  // QUARANTINED).
  IngestResult ingest(const FlowEvent& event);
  // Parses then ingests. Parse failures are counted and rethrown.
  IngestResult ingest_line(std::string_view line, std::size_t line_number = 1);

  PipelineStats stats() const;
  const AlertPolicy& policy() const noexcept { return policy_; }

 private:
  struct Window {
    std::mutex mu;
    std::vector<bool> ring;
    std::size_t next = 0;
    std::uint32_t attacks = 0;
    SessionCounters counters;
  };

  std::shared_ptr<Window> window_for(const std::string& session_id);

  std::shared_ptr<const classifier::Model> model_;
  AlertPolicy policy_;
  gateway::Gateway& gateway_;
  audit::AuditLog& log_;

  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, std::shared_ptr<Window>> windows_;
  std::atomic<std::uint64_t> parse_errors_{0};
  std::atomic<std::uint64_t> rejected_{0};
};

// Labeled records replayed as a flow for one session. Labels are stripped
// from the events and kept in `truth`.
struct SimulatedTraffic {
  std::vector<FlowEvent> events;
  std::vector<dataset::TrafficClass> truth;
};

// Shuffles `records` with a seeded mt19937_64 and spaces events 1/rate
// seconds apart starting at `start`. Error(invalid_state) unless the session
// is ONLINE.
SimulatedTraffic simulate_traffic(std::span<const dataset::ConnectionRecord> records, std::string_view session_id,
                                  double events_per_second, std::uint64_t seed, Timestamp start,
                                  const gateway::Gateway& gateway);

struct ReplayReport {
  std::size_t events = 0;
  std::size_t attack_verdicts = 0;
  std::optional<std::size_t> quarantined_at;  // 0-based event index
  std::size_t alerts = 0;
  std::size_t rejected = 0;
};

// Feeds every event to `monitor`; events rejected by the gateway are
// counted, not fatal.
ReplayReport replay(Monitor& monitor, const SimulatedTraffic& traffic);

}  // namespace edgeguard::monitor
