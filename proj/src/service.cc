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

#include "equiview/service.h"

#include <unistd.h>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <iterator>
#include <system_error>

namespace equiview {

struct InterviewService::Session {
  std::string id;
  // Held for a whole talk exchange or clear.
  std::mutex exchange_mu;
  // Guards the published state below; held only to copy or swap it.
  mutable std::mutex state_mu;
  std::shared_ptr<const ConversationLog> log;
  std::optional<Rating> last_rating;
  std::uint64_t epoch = 0;

  std::shared_ptr<const ConversationLog> Snapshot() const {
    std::lock_guard lock(state_mu);
    return log;
  }
};

namespace {

// Upload written to disk for the duration of one exchange.
class TempUpload {
 public:
  TempUpload(const std::filesystem::path& dir, std::string_view name,
             const std::string& bytes)
      : path_(dir / std::string(name)) {
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError(path_.string(), "cannot create upload file");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      Remove();
      throw StorageError(path_.string(), "cannot write upload file");
    }
  }
  ~TempUpload() { Remove(); }

  TempUpload(const TempUpload&) = delete;
  TempUpload& operator=(const TempUpload&) = delete;

  std::string Read() const {
    std::ifstream in(path_, std::ios::binary);
    if (!in) throw StorageError(path_.string(), "cannot reopen upload file");
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
  }

 private:
  void Remove() {
    std::error_code ignored;
    std::filesystem::remove(path_, ignored);
  }

  std::filesystem::path path_;
};

std::optional<Rating> LastRatingIn(const ConversationLog& log) {
  std::optional<Rating> found;
  for (const Turn& t : log.turns()) {
    if (t.role != Role::kAssistant) continue;
    if (auto r = FindRating(t.text)) found = r;
  }
  return found;
}

Timestamp NotBefore(Timestamp floor) { return std::max(Now(), floor); }

void EnsureDirectory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw StorageError(dir.string(), "cannot create directory: " + ec.message());
}

}  // namespace

bool IsValidSessionId(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

InterviewService::InterviewService(ServiceConfig config, Providers providers)
    : config_(std::move(config)), providers_(std::move(providers)) {
  if (!providers_.transcriber || !providers_.responder || !providers_.synthesizer) {
    throw InvalidArgument("interview service needs all three providers");
  }
  if (config_.session_dir.empty()) throw InvalidArgument("session directory is empty");
  if (config_.temp_dir.empty()) config_.temp_dir = config_.session_dir / "tmp";
  EnsureDirectory(config_.session_dir);
  EnsureDirectory(config_.temp_dir);

  for (const auto& entry : std::filesystem::directory_iterator(config_.session_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    const std::string id = entry.path().stem().string();
    if (!IsValidSessionId(id)) continue;
    ConversationLog log = LoadLog(entry.path());
    if (log.session_id() != id) {
      std::cerr << "warning: skipping " << entry.path().string()
                << ": it holds session '" << log.session_id() << "'\n";
      continue;
    }
    auto session = std::make_shared<Session>();
    session->id = id;
    session->last_rating = LastRatingIn(log);
    session->log = std::make_shared<const ConversationLog>(std::move(log));
    sessions_.emplace(id, std::move(session));
  }
  FindOrCreate(kDefaultSessionId);
}

InterviewService::~InterviewService() = default;

std::filesystem::path InterviewService::SessionPath(std::string_view session_id) const {
  return config_.session_dir / (std::string(session_id) + ".json");
}

std::shared_ptr<InterviewService::Session> InterviewService::Find(
    std::string_view id) const {
  std::lock_guard lock(sessions_mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw SessionNotFound(id);
  return it->second;
}

std::shared_ptr<InterviewService::Session> InterviewService::FindOrCreate(
    std::string_view id) {
  if (!IsValidSessionId(id)) {
    throw InvalidArgument("invalid session id '" + std::string(id) + "'");
  }
  std::lock_guard lock(sessions_mu_);
  auto it = sessions_.find(id);
  if (it != sessions_.end()) return it->second;

  ConversationLog log = NewLog(config_.seed_prompt, id);
  SaveLog(log, SessionPath(id));
  auto session = std::make_shared<Session>();
  session->id = std::string(id);
  session->log = std::make_shared<const ConversationLog>(std::move(log));
  sessions_.emplace(std::string(id), session);
  return session;
}

void InterviewService::Publish(Session& session, ConversationLog log,
                               bool reset_rating, std::optional<Rating> rating) {
  auto next = std::make_shared<const ConversationLog>(std::move(log));
  std::lock_guard lock(session.state_mu);
  session.log = std::move(next);
  if (reset_rating) session.last_rating.reset();
  if (rating) session.last_rating = rating;
  ++session.epoch;
}

TalkResult InterviewService::HandleTalk(std::string_view session_id,
                                        const AudioBlob& upload) {
  auto session = FindOrCreate(session_id);
  std::unique_lock exchange(session->exchange_mu, std::try_to_lock);
  if (!exchange.owns_lock()) throw SessionBusy(session_id);

  TalkResult result;
  const std::string name = session->id + "-" + std::to_string(::getpid()) + "-" +
                           std::to_string(++upload_counter_) + ".upload";
  {
    TempUpload temp(config_.temp_dir, name, upload.bytes());
    const AudioBlob stored(temp.Read(), upload.media_type(), upload.duration_hint());
    result.transcript = providers_.transcriber->Transcribe(stored);
  }

  const auto base = session->Snapshot();
  ConversationLog next = Append(
      *base, Turn{Role::kCandidate, result.transcript, NotBefore(base->last_timestamp())});
  result.reply = providers_.responder->Respond(next);
  next = Append(next, Turn{Role::kAssistant, result.reply,
                           NotBefore(next.last_timestamp())});
  result.audio = providers_.synthesizer->Synthesize(result.reply);

  SaveLog(next, SessionPath(session->id));
  result.rating = FindRating(result.reply);
  Publish(*session, std::move(next), false, result.rating);
  return result;
}

PolarityReport InterviewService::HandleAnalyze(std::string_view session_id) const {
  const auto log = Find(session_id)->Snapshot();
  return AnalyzeLog(*log, config_.lexicon, config_.thresholds);
}

ConversationLog InterviewService::HandleHistory(std::string_view session_id) const {
  return *Find(session_id)->Snapshot();
}

std::optional<Rating> InterviewService::HandleRating(std::string_view session_id) const {
  const auto session = Find(session_id);
  std::lock_guard lock(session->state_mu);
  return session->last_rating;
}

void InterviewService::HandleClear(std::string_view session_id) {
  auto session = Find(session_id);
  std::lock_guard exchange(session->exchange_mu);
  ConversationLog cleared = Clear(*session->Snapshot());
  SaveLog(cleared, SessionPath(session->id));
  Publish(*session, std::move(cleared), true, std::nullopt);
}

std::vector<std::string> InterviewService::SessionIds() const {
  std::lock_guard lock(sessions_mu_);
  std::vector<std::string> ids;
  for (const auto& [id, session] : sessions_) ids.push_back(id);
  return ids;
}

std::uint64_t InterviewService::Epoch(std::string_view session_id) const {
  const auto session = Find(session_id);
  std::lock_guard lock(session->state_mu);
  return session->epoch;
}

}  // namespace equiview
