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

// Interview sessions and the talk pipeline, independent of HTTP.
//
// A talk exchange runs transcribe -> append candidate turn -> respond ->
// append assistant turn -> open the synthesis stream -> persist -> publish.
// Nothing becomes visible until the log has been written to disk, so a
// failure at any stage leaves the session exactly as it was. The uploaded
// audio lives in a temporary file for the duration of the exchange and is
// removed on every path out.
//
// Each session is persisted as <session_dir>/<session_id>.json and reloaded
// on startup. The "default" session always exists; other sessions come into
// being on their first talk exchange.

#ifndef EQUIVIEW_SERVICE_H_
#define EQUIVIEW_SERVICE_H_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "equiview/conversation.h"
#include "equiview/error.h"
#include "equiview/providers.h"
#include "equiview/rubric.h"
#include "equiview/sentiment.h"

namespace equiview {

inline constexpr std::string_view kDefaultSessionId = "default";

class SessionNotFound : public NotFound {
 public:
  explicit SessionNotFound(std::string_view id)
      : NotFound("unknown session '" + std::string(id) + "'") {}
};

// Another talk exchange is in flight on the same session.
class SessionBusy : public Error {
 public:
  explicit SessionBusy(std::string_view id)
      : Error("session '" + std::string(id) + "' is busy with another exchange") {}
};

// Session ids double as file names: 1-64 characters of [A-Za-z0-9_-].
bool IsValidSessionId(std::string_view id);

struct ServiceConfig {
  std::filesystem::path session_dir;
  // Upload scratch space; defaults to <session_dir>/tmp.
  std::filesystem::path temp_dir;
  std::string seed_prompt = RubricPrompt();
  Lexicon lexicon = DefaultLexicon();
  Thresholds thresholds;
};

struct TalkResult {
  std::unique_ptr<AudioStream> audio;
  std::string transcript;
  std::string reply;
  std::optional<Rating> rating;  // present when the reply carried one
};

class InterviewService {
 public:
  // Creates the directories, loads every <id>.json in session_dir and makes
  // sure the default session exists. Throws StorageError or ParseError.
  InterviewService(ServiceConfig config, Providers providers);
  ~InterviewService();

  InterviewService(const InterviewService&) = delete;
  InterviewService& operator=(const InterviewService&) = delete;

  // Throws SessionBusy, ProviderError (stage attached), StorageError, or
  // InvalidArgument for a malformed session id.
  TalkResult HandleTalk(std::string_view session_id, const AudioBlob& upload);

  // Read-only; these never touch the session files.
  PolarityReport HandleAnalyze(std::string_view session_id) const;
  ConversationLog HandleHistory(std::string_view session_id) const;
  std::optional<Rating> HandleRating(std::string_view session_id) const;

  // Resets the log to its seed, rewrites the file and forgets the rating.
  void HandleClear(std::string_view session_id);

  std::vector<std::string> SessionIds() const;
  // Number of committed mutations of a session since startup.
  std::uint64_t Epoch(std::string_view session_id) const;

  const ServiceConfig& config() const { return config_; }
  std::filesystem::path SessionPath(std::string_view session_id) const;

 private:
  struct Session;

  std::shared_ptr<Session> Find(std::string_view id) const;
  std::shared_ptr<Session> FindOrCreate(std::string_view id);
  void Publish(Session& session, ConversationLog log, bool reset_rating,
               std::optional<Rating> rating);

  ServiceConfig config_;
  Providers providers_;
  mutable std::mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Session>, std::less<>> sessions_;
  std::atomic<std::uint64_t> upload_counter_{0};
};

}  // namespace equiview

#endif  // EQUIVIEW_SERVICE_H_
