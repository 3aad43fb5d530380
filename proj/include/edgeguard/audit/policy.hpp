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

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace edgeguard::audit {

struct PolicyDocument {
  std::string policy_id;
  std::uint32_t version = 0;
  std::string title;
  std::string text;
  std::string content_hash;  // sha256 hex of text

  bool operator==(const PolicyDocument&) const = default;
};

// What a client echoes back when accepting a policy.
struct PolicyRef {
  std::string policy_id;
  std::uint32_t version = 0;
  std::string content_hash;

  bool operator==(const PolicyRef&) const = default;
};

PolicyDocument make_policy(std::string policy_id, std::uint32_t version, std::string title, std::string text);
PolicyRef ref_of(const PolicyDocument& doc);

// JSON object {policy_id, version, title?, text, content_hash?}. A present
// content_hash must match the text. Throws Error(validation).
PolicyDocument parse_policy(std::string_view json_text);
PolicyDocument load_policy_file(const std::string& path);

// Published policy versions. Documents are never edited: a change is a new
// version, and versions of one policy_id strictly increase.
class PolicyRegistry {
 public:
  // Throws Error(validation) for a non-increasing version or a hash that
  // does not match the text.
  void publish(PolicyDocument doc);

  // Latest version of `policy_id`; Error(not_found) if none.
  PolicyDocument active(std::string_view policy_id) const;
  std::optional<PolicyDocument> find(std::string_view policy_id, std::uint32_t version) const;
  bool is_active(const PolicyRef& ref) const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::vector<PolicyDocument>, std::less<>> docs_;
};

}  // namespace edgeguard::audit
