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


#include "edgeguard/dataset/nslkdd.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace edgeguard::dataset {

using K = ColumnKind;

const std::array<ColumnSpec, kFeatureCount> kSchema{{
    {"duration", K::amount},
    {"protocol_type", K::categorical},
    {"service", K::categorical},
    {"flag", K::categorical},
    {"src_bytes", K::amount},
    {"dst_bytes", K::amount},
    {"land", K::binary},
    {"wrong_fragment", K::amount},
    {"urgent", K::amount},
    {"hot", K::amount},
    {"num_failed_logins", K::amount},
    {"logged_in", K::binary},
    {"num_compromised", K::amount},
    {"root_shell", K::amount},
    {"su_attempted", K::amount},
    {"num_root", K::amount},
    {"num_file_creations", K::amount},
    {"num_shells", K::amount},
    {"num_access_files", K::amount},
    {"num_outbound_cmds", K::amount},
    {"is_host_login", K::binary},
    {"is_guest_login", K::binary},
    {"count", K::amount},
    {"srv_count", K::amount},
    {"serror_rate", K::rate},
    {"srv_serror_rate", K::rate},
    {"rerror_rate", K::rate},
    {"srv_rerror_rate", K::rate},
    {"same_srv_rate", K::rate},
    {"diff_srv_rate", K::rate},
    {"srv_diff_host_rate", K::rate},
    {"dst_host_count", K::amount},
    {"dst_host_srv_count", K::amount},
    {"dst_host_same_srv_rate", K::rate},
    {"dst_host_diff_srv_rate", K::rate},
    {"dst_host_same_src_port_rate", K::rate},
    {"dst_host_srv_diff_host_rate", K::rate},
    {"dst_host_serror_rate", K::rate},
    {"dst_host_srv_serror_rate", K::rate},
    {"dst_host_rerror_rate", K::rate},
    {"dst_host_srv_rerror_rate", K::rate},
}};

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

double parse_number(std::string_view text, std::size_t line, std::string_view column) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v)) {
    throw ParseError(ParseErrorKind::type, line, std::string(column),
                     "non-numeric value '" + std::string(text) + "'");
  }
  return v;
}

void check_range(double v, ColumnKind kind, std::size_t line, std::string_view column) {
  switch (kind) {
    case ColumnKind::amount:
      if (v < 0.0) throw ParseError(ParseErrorKind::range, line, std::string(column), "negative value");
      if (v != std::floor(v)) {
        throw ParseError(ParseErrorKind::type, line, std::string(column), "expected an integer");
      }
      break;
    case ColumnKind::binary:
      if (v != 0.0 && v != 1.0) {
        throw ParseError(ParseErrorKind::range, line, std::string(column), "expected 0 or 1");
      }
      break;
    case ColumnKind::rate:
      if (v < 0.0 || v > 1.0) {
        throw ParseError(ParseErrorKind::range, line, std::string(column), "rate outside [0,1]");
      }
      break;
    case ColumnKind::categorical:
      break;
  }
}

std::string& token_slot(ConnectionRecord& rec, std::size_t column) {
  switch (column) {
    case kProtocolColumn: return rec.protocol_type;
    case kServiceColumn: return rec.service;
    default: return rec.flag;
  }
}

void append_number(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

ParseError::ParseError(ParseErrorKind kind, std::size_t line, std::string column, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + (column.empty() ? "" : " (" + column + ")") +
                         ": " + what),
      kind_(kind),
      line_(line),
      column_(std::move(column)) {}

double ConnectionRecord::value(std::string_view column) const {
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (kSchema[i].name == column) {
      if (kSchema[i].kind == ColumnKind::categorical) {
        throw std::invalid_argument("column '" + std::string(column) + "' is categorical");
      }
      return values[i];
    }
  }
  throw std::invalid_argument("unknown column '" + std::string(column) + "'");
}

const std::string& ConnectionRecord::categorical(std::size_t column) const {
  switch (column) {
    case kProtocolColumn: return protocol_type;
    case kServiceColumn: return service;
    case kFlagColumn: return flag;
    default: throw std::invalid_argument("column " + std::to_string(column) + " is not categorical");
  }
}

ConnectionRecord parse_record(std::string_view line, std::size_t line_number, bool require_label) {
  const auto fields = split_fields(line);
  const std::size_t n = fields.size();
  const bool shape_ok = (n == kFeatureCount + 1 || n == kFeatureCount + 2) || (!require_label && n == kFeatureCount);
  if (!shape_ok) {
    throw ParseError(ParseErrorKind::malformed_row, line_number, "",
                     "expected " + std::string(require_label ? "42 or 43" : "41 to 43") + " fields, got " +
                         std::to_string(n));
  }

  ConnectionRecord rec;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    const auto& spec = kSchema[i];
    if (spec.kind == ColumnKind::categorical) {
      if (fields[i].empty()) {
        throw ParseError(ParseErrorKind::type, line_number, std::string(spec.name), "empty token");
      }
      token_slot(rec, i) = std::string(fields[i]);
      continue;
    }
    const double v = parse_number(fields[i], line_number, spec.name);
    check_range(v, spec.kind, line_number, spec.name);
    rec.values[i] = v;
  }

  if (n > kFeatureCount) {
    rec.label = std::string(fields[kFeatureCount]);
    if (rec.label.empty()) throw ParseError(ParseErrorKind::type, line_number, "label", "empty label");
  }
  if (n == kFeatureCount + 2) {
    const auto text = fields[kFeatureCount + 1];
    int d = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), d);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
      throw ParseError(ParseErrorKind::type, line_number, "difficulty", "non-integer difficulty");
    }
    rec.difficulty = d;
  }
  return rec;
}

std::vector<ConnectionRecord> parse_nslkdd(std::istream& in) {
  std::vector<ConnectionRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    records.push_back(parse_record(line, line_number));
  }
  return records;
}

std::vector<ConnectionRecord> load_nslkdd(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file '" + path + "'");
  return parse_nslkdd(in);
}

std::string format_record(const ConnectionRecord& record) {
  std::string out;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (i) out.push_back(',');
    if (kSchema[i].kind == ColumnKind::categorical) {
      out += record.categorical(i);
    } else {
      append_number(out, record.values[i]);
    }
  }
  if (!record.label.empty()) {
    out.push_back(',');
    out += record.label;
    if (record.difficulty) {
      out.push_back(',');
      out += std::to_string(*record.difficulty);
    }
  }
  return out;
}

TrafficClass binarize_label(std::string_view label) {
  if (label.empty()) throw std::invalid_argument("binarize_label: empty label");
  // KDD'99-derived files sometimes terminate labels with '.'.
  if (label.back() == '.') label.remove_suffix(1);
  return label == "normal" ? TrafficClass::normal : TrafficClass::attack;
}

std::size_t FeatureVocabulary::slot(std::size_t column) {
  switch (column) {
    case kProtocolColumn: return 0;
    case kServiceColumn: return 1;
    case kFlagColumn: return 2;
    default: throw std::invalid_argument("column " + std::to_string(column) + " is not categorical");
  }
}

std::uint32_t FeatureVocabulary::add(std::size_t column, std::string_view token) {
  auto& col = columns_[slot(column)];
  const std::string key(token);
  if (auto it = col.lookup.find(key); it != col.lookup.end()) return it->second;
  col.tokens.push_back(key);
  const auto idx = static_cast<std::uint32_t>(col.tokens.size());
  col.lookup.emplace(key, idx);
  return idx;
}

std::uint32_t FeatureVocabulary::index_of(std::size_t column, std::string_view token) const noexcept {
  const auto& col = columns_[slot(column)];
  if (auto it = col.lookup.find(std::string(token)); it != col.lookup.end()) return it->second;
  return kUnseen;
}

std::optional<std::string> FeatureVocabulary::token_at(std::size_t column, std::uint32_t index) const {
  const auto& col = columns_[slot(column)];
  if (index == kUnseen || index > col.tokens.size()) return std::nullopt;
  return col.tokens[index - 1];
}

const std::vector<std::string>& FeatureVocabulary::tokens(std::size_t column) const {
  return columns_[slot(column)].tokens;
}

bool FeatureVocabulary::operator==(const FeatureVocabulary& other) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].tokens != other.columns_[i].tokens) return false;
  }
  return true;
}

FeatureVocabulary build_vocabulary(std::span<const ConnectionRecord> records) {
  if (records.empty()) throw EmptyDatasetError("build_vocabulary: no records");
  FeatureVocabulary vocab;
  for (const auto& r : records) {
    for (std::size_t c : FeatureVocabulary::kColumns) vocab.add(c, r.categorical(c));
  }
  return vocab;
}

EncodedSample encode(const ConnectionRecord& record, const FeatureVocabulary& vocab) {
  EncodedSample s;
  s.features = record.values;
  for (std::size_t c : FeatureVocabulary::kColumns) {
    s.features[c] = static_cast<double>(vocab.index_of(c, record.categorical(c)));
  }
  s.label = record.label.empty() ? TrafficClass::normal : binarize_label(record.label);
  return s;
}

std::vector<EncodedSample> encode_all(std::span<const ConnectionRecord> records, const FeatureVocabulary& vocab) {
  std::vector<EncodedSample> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(encode(r, vocab));
  return out;
}

DecodedCategoricals decode_categoricals(const EncodedSample& sample, const FeatureVocabulary& vocab) {
  auto token = [&](std::size_t c) {
    return vocab.token_at(c, static_cast<std::uint32_t>(sample.features[c]));
  };
  return {token(kProtocolColumn), token(kServiceColumn), token(kFlagColumn)};
}

}  // namespace edgeguard::dataset
