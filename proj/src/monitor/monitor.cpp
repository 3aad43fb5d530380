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


#include "edgeguard/monitor/monitor.hpp"

#include <algorithm>
#include <random>

#include <nlohmann/json.hpp>

#include "edgeguard/common/error.hpp"

namespace edgeguard::monitor {

using dataset::ParseError;
using dataset::ParseErrorKind;
using dataset::TrafficClass;

void AlertPolicy::validate() const {
  if (window == 0) throw Error(ErrorKind::validation, "alert window must be positive");
  if (threshold == 0) throw Error(ErrorKind::validation, "alert threshold must be positive");
  if (threshold > window) {
    throw Error(ErrorKind::validation, "alert threshold K=" + std::to_string(threshold) +
                                           " exceeds window W=" + std::to_string(window));
  }
  if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) {
    throw Error(ErrorKind::validation, "min_confidence must be in [0, 1]");
  }
}

FlowEvent parse_flow_line(std::string_view line, std::size_t line_number) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw ParseError(ParseErrorKind::malformed_row, line_number, "", "flow event is not valid JSON");
  }
  if (!j.is_object()) throw ParseError(ParseErrorKind::malformed_row, line_number, "", "flow event must be an object");
  FlowEvent ev;
  const auto sid = j.find("session_id");
  const auto ts = j.find("timestamp");
  const auto rec = j.find("record");
  if (sid == j.end() || !sid->is_string() || sid->get<std::string>().empty()) {
    throw ParseError(ParseErrorKind::malformed_row, line_number, "", "flow event needs a session_id");
  }
  if (ts == j.end() || !ts->is_number_integer()) {
    throw ParseError(ParseErrorKind::type, line_number, "", "flow event needs an integer timestamp");
  }
  if (rec == j.end()) throw ParseError(ParseErrorKind::malformed_row, line_number, "", "flow event needs a record");
  ev.session_id = sid->get<std::string>();
  ev.timestamp = from_epoch_ms(ts->get<std::int64_t>());
  std::string csv;
  if (rec->is_string()) {
    csv = rec->get<std::string>();
  } else if (rec->is_array()) {
    for (std::size_t i = 0; i < rec->size(); ++i) {
      if (i) csv.push_back(',');
      const auto& v = (*rec)[i];
      csv += v.is_string() ? v.get<std::string>() : v.dump();
    }
  } else {
    throw ParseError(ParseErrorKind::type, line_number, "", "record must be a string or an array");
  }
  ev.record = dataset::parse_record(csv, line_number, false);
  return ev;
}

std::string format_flow_line(const FlowEvent& event) {
  dataset::ConnectionRecord unlabeled = event.record;
  unlabeled.label.clear();
  unlabeled.difficulty.reset();
  nlohmann::ordered_json j;
  j["session_id"] = event.session_id;
  j["timestamp"] = to_epoch_ms(event.timestamp);
  j["record"] = dataset::format_record(unlabeled);
  return j.dump();
}

std::string_view to_string(Action a) noexcept {
  switch (a) {
    case Action::none: return "none";
    case Action::alert: return "alert";
    case Action::quarantine: return "quarantine";
  }
  return "unknown";
}

Monitor::Monitor(std::shared_ptr<const classifier::Model> model, AlertPolicy policy, gateway::Gateway& gateway,
                 audit::AuditLog& log)
    : model_(std::move(model)), policy_(policy), gateway_(gateway), log_(log) {
  if (!model_) throw std::invalid_argument("Monitor: model required");
  policy_.validate();
}

std::shared_ptr<Monitor::Window> Monitor::window_for(const std::string& session_id) {
  {
    std::shared_lock lock(mu_);
    if (auto it = windows_.find(session_id); it != windows_.end()) return it->second;
  }
  std::unique_lock lock(mu_);
  auto& w = windows_[session_id];
  if (!w) {
    w = std::make_shared<Window>();
    w->ring.assign(policy_.window, false);
  }
  return w;
}

IngestResult Monitor::ingest(const FlowEvent& event) {
  const auto session = gateway_.find(event.session_id);
  if (!session) {
    ++rejected_;
    throw Error(ErrorKind::not_found, "unknown session");
  }
  if (session->state != gateway::SessionState::ONLINE && session->state != gateway::SessionState::QUARANTINED) {
    ++rejected_;
    throw Error(ErrorKind::not_admitted, "session is " + std::string(gateway::to_string(session->state)));
  }

  auto w = window_for(event.session_id);
  std::lock_guard lock(w->mu);
  try {
    gateway_.record_activity(event.session_id, event.timestamp);
  } catch (const Error&) {
    ++rejected_;
    throw;
  }

  const auto sample = dataset::encode(event.record, classifier::vocabulary(*model_));
  const auto prediction = classifier::predict(*model_, sample.features);

  IngestResult out;
  out.verdict = prediction.label;
  out.confidence = prediction.confidence;
  const bool counted = prediction.label == TrafficClass::attack && prediction.confidence >= policy_.min_confidence;
  w->attacks -= w->ring[w->next];
  w->ring[w->next] = counted;
  w->attacks += counted;
  w->next = (w->next + 1) % w->ring.size();
  out.attacks_in_window = w->attacks;

  ++w->counters.events;
  if (prediction.label == TrafficClass::attack) ++w->counters.attacks;
  if (!counted) return out;

  auto evidence = [&] {
    audit::Payload p = audit::Payload::object();
    p["session_id"] = event.session_id;
    p["confidence"] = prediction.confidence;
    p["attacks_in_window"] = w->attacks;
    p["window"] = policy_.window;
    p["record"] = {{"protocol_type", event.record.protocol_type},
                   {"service", event.record.service},
                   {"flag", event.record.flag},
                   {"src_bytes", event.record.value("src_bytes")},
                   {"dst_bytes", event.record.value("dst_bytes")}};
    return p;
  };

  if (session->state == gateway::SessionState::ONLINE && w->attacks >= policy_.threshold) {
    audit::Payload p = evidence();
    log_.append(audit::AuditKind::alert_raised, p, event.timestamp);
    ++w->counters.alerts;
    p["reason"] = "attack verdicts " + std::to_string(w->attacks) + "/" + std::to_string(policy_.window) +
                  " reached threshold " + std::to_string(policy_.threshold);
    try {
      gateway_.quarantine(event.session_id, p, event.timestamp);
      ++w->counters.quarantines;
      out.action = Action::quarantine;
    } catch (const Error& e) {
      // Another caller changed the session first; the alert still stands.
      if (e.kind() != ErrorKind::invalid_state) throw;
      out.action = Action::alert;
    }
  } else if (session->state == gateway::SessionState::QUARANTINED) {
    log_.append(audit::AuditKind::alert_raised, evidence(), event.timestamp);
    ++w->counters.alerts;
    out.action = Action::alert;
  }
  return out;
}

IngestResult Monitor::ingest_line(std::string_view line, std::size_t line_number) {
  FlowEvent ev;
  try {
    ev = parse_flow_line(line, line_number);
  } catch (const ParseError&) {
    ++parse_errors_;
    throw;
  }
  return ingest(ev);
}

PipelineStats Monitor::stats() const {
  std::vector<std::pair<std::string, std::shared_ptr<Window>>> entries;
  {
    std::shared_lock lock(mu_);
    entries.assign(windows_.begin(), windows_.end());
  }
  PipelineStats s;
  for (const auto& [id, w] : entries) {
    std::lock_guard lock(w->mu);
    s.sessions[id] = w->counters;
    s.events_processed += w->counters.events;
    s.attacks_flagged += w->counters.attacks;
    s.alerts += w->counters.alerts;
    s.quarantines += w->counters.quarantines;
  }
  s.parse_errors = parse_errors_.load();
  s.rejected = rejected_.load();
  return s;
}

SimulatedTraffic simulate_traffic(std::span<const dataset::ConnectionRecord> records, std::string_view session_id,
                                  double events_per_second, std::uint64_t seed, Timestamp start,
                                  const gateway::Gateway& gateway) {
  if (!(events_per_second > 0.0)) throw Error(ErrorKind::validation, "rate must be positive");
  if (gateway.get(session_id).state != gateway::SessionState::ONLINE) {
    throw Error(ErrorKind::invalid_state, "traffic can only be simulated for an ONLINE session");
  }
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(order[i - 1], order[pick(rng)]);
  }

  SimulatedTraffic out;
  out.events.reserve(records.size());
  out.truth.reserve(records.size());
  const double step_ms = 1000.0 / events_per_second;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& r = records[order[i]];
    FlowEvent ev;
    ev.session_id = std::string(session_id);
    ev.timestamp = start + Duration{static_cast<std::int64_t>(static_cast<double>(i) * step_ms)};
    ev.record = r;
    ev.record.label.clear();
    ev.record.difficulty.reset();
    out.events.push_back(std::move(ev));
    out.truth.push_back(dataset::binarize_label(r.label));
  }
  return out;
}

ReplayReport replay(Monitor& monitor, const SimulatedTraffic& traffic) {
  ReplayReport rep;
  for (std::size_t i = 0; i < traffic.events.size(); ++i) {
    ++rep.events;
    IngestResult r;
    try {
      r = monitor.ingest(traffic.events[i]);
    } catch (const Error&) {
      ++rep.rejected;
      continue;
    }
    if (r.verdict == TrafficClass::attack) ++rep.attack_verdicts;
    if (r.action == Action::alert) ++rep.alerts;
    if (r.action == Action::quarantine) {
      ++rep.alerts;
      if (!rep.quarantined_at) rep.quarantined_at = i;
    }
  }
  return rep;
}

}  // namespace edgeguard::monitor
