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


#include "edgeguard/common/log.hpp"

#include <iostream>

#include "edgeguard/common/time.hpp"

namespace edgeguard::log {

namespace {

std::mutex g_mu;
std::ostream* g_sink = &std::cerr;
Level g_level = Level::info;

std::string_view name(Level l) {
  switch (l) {
    case Level::debug: return "DEBUG";
    case Level::info: return "INFO";
    case Level::warn: return "WARN";
    case Level::error: return "ERROR";
  }
  return "?";
}

}  // namespace

void set_sink(std::ostream* out) {
  std::lock_guard lock(g_mu);
  g_sink = out;
}

void set_level(Level level) {
  std::lock_guard lock(g_mu);
  g_level = level;
}

void write(Level level, std::string_view message) {
  std::lock_guard lock(g_mu);
  if (!g_sink || level < g_level) return;
  *g_sink << to_epoch_ms(wall_clock_now()) << ' ' << name(level) << ' ' << message << '\n';
  g_sink->flush();
}

}  // namespace edgeguard::log
