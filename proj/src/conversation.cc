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

#include "equiview/conversation.h"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <system_error>

#include "equiview/error.h"
#include "utf8.h"

namespace equiview {

namespace {

using nlohmann::json;

const std::set<std::string>& TopLevelKeys() {
  static const std::set<std::string> keys = {"session_id", "seed", "turns"};
  return keys;
}

const std::set<std::string>& TurnKeys() {
  static const std::set<std::string> keys = {"role", "text", "ts_ms"};
  return keys;
}

void RejectUnknownKeys(const json& obj, const std::set<std::string>& allowed,
                       const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      const std::string field = where.empty() ? key : where + "." + key;
      throw ParseError(field, "unknown key '" + field + "'");
    }
  }
}

const json& Require(const json& obj, const std::string& key,
                    const std::string& field) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(field, "missing field '" + field + "'");
  return *it;
}

std::string RequireString(const json& obj, const std::string& key,
                          const std::string& field) {
  const json& v = Require(obj, key, field);
  if (!v.is_string()) {
    throw ParseError(field, "field '" + field + "' must be a string");
  }
  return v.get<std::string>();
}

}  // namespace

Timestamp Now() {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(
      std::chrono::system_clock::now());
}

std::string_view RoleName(Role role) {
  switch (role) {
    case Role::kSystem:
      return "system";
    case Role::kCandidate:
      return "candidate";
    case Role::kAssistant:
      return "assistant";
  }
  return "unknown";
}

Role ParseRole(std::string_view name) {
  if (name == "system") return Role::kSystem;
  if (name == "candidate") return Role::kCandidate;
  if (name == "assistant") return Role::kAssistant;
  throw ParseError("role", "unknown role '" + std::string(name) + "'");
}

ConversationLog NewLog(std::string_view seed_prompt,
                       std::string_view session_id, Timestamp now) {
  if (seed_prompt.empty()) throw InvalidArgument("seed prompt is empty");
  if (session_id.empty()) throw InvalidArgument("session id is empty");
  if (!internal::IsValidUtf8(seed_prompt)) {
    throw InvalidArgument("seed prompt is not valid UTF-8");
  }
  ConversationLog log;
  log.session_id_ = std::string(session_id);
  log.seed_ = std::string(seed_prompt);
  log.turns_.push_back(Turn{Role::kSystem, log.seed_, now});
  return log;
}

ConversationLog Append(const ConversationLog& log, Turn turn) {
  if (turn.role == Role::kSystem) {
    throw InvalidArgument("system turns may only seed a log");
  }
  if (turn.text.empty()) {
    throw InvalidArgument(std::string(RoleName(turn.role)) +
                          " turn text is empty");
  }
  if (!internal::IsValidUtf8(turn.text)) {
    throw InvalidArgument("turn text is not valid UTF-8");
  }
  if (turn.timestamp < log.last_timestamp()) {
    throw InvalidArgument("turn timestamp precedes the last turn");
  }
  ConversationLog next = log;
  next.turns_.push_back(std::move(turn));
  return next;
}

ConversationLog Clear(const ConversationLog& log) {
  ConversationLog next = log;
  next.turns_.resize(1);
  return next;
}

nlohmann::json LogToJson(const ConversationLog& log) {
  json turns = json::array();
  for (const Turn& t : log.turns()) {
    turns.push_back({{"role", RoleName(t.role)},
                     {"text", t.text},
                     {"ts_ms", t.timestamp.time_since_epoch().count()}});
  }
  return json{{"session_id", log.session_id()},
              {"seed", log.seed()},
              {"turns", std::move(turns)}};
}

ConversationLog LogFromJson(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("<document>", "log must be an object");
  RejectUnknownKeys(doc, TopLevelKeys(), "");

  ConversationLog log;
  log.session_id_ = RequireString(doc, "session_id", "session_id");
  log.seed_ = RequireString(doc, "seed", "seed");
  if (log.session_id_.empty()) {
    throw ParseError("session_id", "field 'session_id' is empty");
  }
  if (log.seed_.empty()) throw ParseError("seed", "field 'seed' is empty");

  const json& turns = Require(doc, "turns", "turns");
  if (!turns.is_array()) throw ParseError("turns", "field 'turns' must be an array");
  if (turns.empty()) throw ParseError("turns", "log has no seed turn");

  for (std::size_t i = 0; i < turns.size(); ++i) {
    const std::string where = "turns[" + std::to_string(i) + "]";
    const json& t = turns[i];
    if (!t.is_object()) throw ParseError(where, where + " must be an object");
    RejectUnknownKeys(t, TurnKeys(), where);

    Turn turn;
    const std::string role_field = where + ".role";
    try {
      turn.role = ParseRole(RequireString(t, "role", role_field));
    } catch (const ParseError& e) {
      if (e.field() == role_field) throw;
      throw ParseError(role_field, std::string(e.what()) + " in " + role_field);
    }
    turn.text = RequireString(t, "text", where + ".text");
    const json& ts = Require(t, "ts_ms", where + ".ts_ms");
    if (!ts.is_number_integer()) {
      throw ParseError(where + ".ts_ms", "field '" + where +
                                             ".ts_ms' must be an integer");
    }
    turn.timestamp = Timestamp(std::chrono::milliseconds(ts.get<std::int64_t>()));

    if (i == 0) {
      if (turn.role != Role::kSystem || turn.text != log.seed_) {
        throw ParseError(where, "first turn must be the system seed");
      }
    } else {
      if (turn.role == Role::kSystem) {
        throw ParseError(role_field, "system turn after the seed");
      }
      if (turn.text.empty()) {
        throw ParseError(where + ".text", "empty " +
                                              std::string(RoleName(turn.role)) +
                                              " text");
      }
      if (turn.timestamp < log.turns_.back().timestamp) {
        throw ParseError(where + ".ts_ms", "timestamps must not decrease");
      }
    }
    log.turns_.push_back(std::move(turn));
  }
  return log;
}

void SaveLog(const ConversationLog& log, const std::filesystem::path& path) {
  std::string body;
  try {
    body = LogToJson(log).dump(2);
  } catch (const nlohmann::json::exception& e) {
    throw StorageError(path.string(), std::string("cannot encode log: ") + e.what());
  }
  body.push_back('\n');

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw StorageError(path.string(), std::string("cannot open for writing: ") +
                                            std::strerror(errno));
    }
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw StorageError(path.string(), "write failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw StorageError(path.string(), "rename failed: " + ec.message());
  }
}

ConversationLog LoadLog(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) {
      throw NotFound("conversation log not found: " + path.string());
    }
    throw StorageError(path.string(), "cannot open for reading");
  }
  std::string body((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw ParseError("<document>", path.string() + ": " + e.what());
  }
  return LogFromJson(doc);
}

}  // namespace equiview
