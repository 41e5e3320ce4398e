// Copyright 2026 The EquiView Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Interview transcript: an ordered list of role-tagged turns that always
// starts with the system seed prompt, plus its JSON file form.
//
// On-disk layout:
//   {"session_id": "...", "seed": "...",
//    "turns": [{"role": "system|candidate|assistant", "text": "...",
//               "ts_ms": 1700000000000}, ...]}
// Unknown keys are rejected on load.

#ifndef EQUIVIEW_CONVERSATION_H_
#define EQUIVIEW_CONVERSATION_H_

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace equiview {

using Timestamp = std::chrono::time_point<std::chrono::system_clock,
                                          std::chrono::milliseconds>;

// Current UTC time truncated to milliseconds.
Timestamp Now();

enum class Role { kSystem, kCandidate, kAssistant };

std::string_view RoleName(Role role);
// Throws ParseError for anything but "system", "candidate", "assistant".
Role ParseRole(std::string_view name);

struct Turn {
  Role role = Role::kCandidate;
  std::string text;
  Timestamp timestamp{};

  bool operator==(const Turn&) const = default;
};

// Immutable value. Every mutating operation returns a new log; the
// invariants of the class hold for every instance that can be observed.
class ConversationLog {
 public:
  const std::string& session_id() const { return session_id_; }
  const std::string& seed() const { return seed_; }
  std::span<const Turn> turns() const { return turns_; }
  std::size_t turn_count() const { return turns_.size(); }
  Timestamp last_timestamp() const { return turns_.back().timestamp; }

  bool operator==(const ConversationLog&) const = default;

 private:
  friend ConversationLog NewLog(std::string_view, std::string_view, Timestamp);
  friend ConversationLog Append(const ConversationLog&, Turn);
  friend ConversationLog Clear(const ConversationLog&);
  friend ConversationLog LogFromJson(const nlohmann::json&);

  ConversationLog() = default;

  std::string session_id_;
  std::string seed_;
  std::vector<Turn> turns_;
};

// A log holding a single System turn with `seed_prompt`.
// Throws InvalidArgument on an empty seed or session id.
ConversationLog NewLog(std::string_view seed_prompt,
                       std::string_view session_id, Timestamp now = Now());

// Throws InvalidArgument when the turn is a System turn, has empty or
// non-UTF-8 text, or is older than the last turn of the log.
ConversationLog Append(const ConversationLog& log, Turn turn);

// Drops everything but the seed turn. The seed turn keeps its original
// timestamp, so Clear is exactly idempotent.
ConversationLog Clear(const ConversationLog& log);

nlohmann::json LogToJson(const ConversationLog& log);
// Throws ParseError naming the offending field.
ConversationLog LogFromJson(const nlohmann::json& doc);

// Writes through a sibling temporary file and renames it into place, so a
// concurrent reader never sees a partial document. The parent directory must
// already exist. Throws StorageError carrying the path.
void SaveLog(const ConversationLog& log, const std::filesystem::path& path);

// Throws NotFound for a missing file, ParseError for malformed content.
ConversationLog LoadLog(const std::filesystem::path& path);

}  // namespace equiview

#endif  // EQUIVIEW_CONVERSATION_H_
