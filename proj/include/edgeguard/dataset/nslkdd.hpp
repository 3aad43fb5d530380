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

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace edgeguard::dataset {

inline constexpr std::size_t kFeatureCount = 41;

enum class ColumnKind : std::uint8_t {
  categorical,  // protocol_type, service, flag
  amount,       // non-negative integer (durations, bytes, counts)
  binary,       // 0/1 flag
  rate,         // real in [0, 1]
};

struct ColumnSpec {
  std::string_view name;
  ColumnKind kind;
};

// Canonical NSL-KDD column order.
extern const std::array<ColumnSpec, kFeatureCount> kSchema;

// Positions of the three categorical columns within the feature vector.
inline constexpr std::size_t kProtocolColumn = 1;
inline constexpr std::size_t kServiceColumn = 2;
inline constexpr std::size_t kFlagColumn = 3;

// One connection record. Numeric columns live in `values` at their schema
// position; the slots of the three categorical columns are unused (0) and the
// tokens are kept as strings.
struct ConnectionRecord {
  std::array<double, kFeatureCount> values{};
  std::string protocol_type;
  std::string service;
  std::string flag;
  std::string label;  // empty only for unlabeled flow input
  std::optional<int> difficulty;

  double value(std::string_view column) const;
  const std::string& categorical(std::size_t column) const;
};

enum class ParseErrorKind { malformed_row, type, range };

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::size_t line, std::string column, const std::string& what);

  ParseErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& column() const noexcept { return column_; }

 private:
  ParseErrorKind kind_;
  std::size_t line_;
  std::string column_;
};

class EmptyDatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses one CSV row. Labeled rows carry 42 fields (41 + label) or 43 (plus
// difficulty). With `require_label == false` a bare 41-field row is accepted
// as well and the label is left empty.
ConnectionRecord parse_record(std::string_view line, std::size_t line_number, bool require_label = true);

// Parses a whole NSL-KDD file. Blank lines are skipped; the first invalid
// row raises ParseError carrying its 1-based line number.
std::vector<ConnectionRecord> parse_nslkdd(std::istream& in);
std::vector<ConnectionRecord> load_nslkdd(const std::string& path);

// Inverse of parse_record for labeled records (numbers printed in shortest
// round-trip form).
std::string format_record(const ConnectionRecord& record);

enum class TrafficClass : std::uint8_t { normal = 0, attack = 1 };

inline constexpr std::size_t index(TrafficClass c) noexcept { return static_cast<std::size_t>(c); }

TrafficClass binarize_label(std::string_view label);

class FeatureVocabulary {
 public:
  static constexpr std::uint32_t kUnseen = 0;
  static constexpr std::array<std::size_t, 3> kColumns{kProtocolColumn, kServiceColumn, kFlagColumn};

  // Adds `token` if new; returns its index (>= 1).
  std::uint32_t add(std::size_t column, std::string_view token);
  std::uint32_t index_of(std::size_t column, std::string_view token) const noexcept;
  // nullopt for index 0 or out of range.
  std::optional<std::string> token_at(std::size_t column, std::uint32_t index) const;
  // Ordered tokens; token i has index i + 1.
  const std::vector<std::string>& tokens(std::size_t column) const;
  std::size_t size(std::size_t column) const { return tokens(column).size(); }

  bool operator==(const FeatureVocabulary& other) const;

 private:
  struct Column {
    std::vector<std::string> tokens;
    std::unordered_map<std::string, std::uint32_t> lookup;
  };
  static std::size_t slot(std::size_t column);
  std::array<Column, 3> columns_;
};

FeatureVocabulary build_vocabulary(std::span<const ConnectionRecord> records);

struct EncodedSample {
  std::array<double, kFeatureCount> features{};
  TrafficClass label = TrafficClass::normal;
};

// Categorical columns become vocabulary indices; numeric columns pass through.
// An empty label (unlabeled flow) encodes as normal.
EncodedSample encode(const ConnectionRecord& record, const FeatureVocabulary& vocab);
std::vector<EncodedSample> encode_all(std::span<const ConnectionRecord> records, const FeatureVocabulary& vocab);

struct DecodedCategoricals {
  std::optional<std::string> protocol_type;
  std::optional<std::string> service;
  std::optional<std::string> flag;
};
DecodedCategoricals decode_categoricals(const EncodedSample& sample, const FeatureVocabulary& vocab);

}  // namespace edgeguard::dataset
