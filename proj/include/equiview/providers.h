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

// Interfaces to the three external capabilities an interview needs:
// speech-to-text, chat completion and text-to-speech. Each is mockable on its
// own (mock_providers.h) and has an HTTP client (http_providers.h).
//
// Provider failures surface as ProviderError with exactly one kind. Caller
// mistakes (empty text, wrong log shape) are InvalidArgument.

#ifndef EQUIVIEW_PROVIDERS_H_
#define EQUIVIEW_PROVIDERS_H_

#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>

#include "equiview/conversation.h"
#include "equiview/error.h"
#include "json.hpp"

namespace equiview {

enum class MediaType { kWav, kMpeg, kWebm };

// "audio/wav", "audio/mpeg", "audio/webm".
std::string_view MediaTypeName(MediaType type);

// Accepts the canonical names plus common aliases (audio/x-wav, audio/wave,
// audio/mp3). Parameters such as ";codecs=opus" are ignored. Returns nullopt
// for anything else.
std::optional<MediaType> ParseMediaType(std::string_view content_type);

class AudioBlob {
 public:
  // Throws InvalidArgument for an empty payload.
  AudioBlob(std::string bytes, MediaType media_type,
            std::optional<double> duration_hint = std::nullopt);

  const std::string& bytes() const { return bytes_; }
  MediaType media_type() const { return media_type_; }
  std::optional<double> duration_hint() const { return duration_hint_; }

 private:
  std::string bytes_;
  MediaType media_type_;
  std::optional<double> duration_hint_;
};

struct ProviderConfig {
  std::string base_url;
  std::string credential;
  // Model for STT/chat, voice id for TTS.
  std::string model;
  std::chrono::milliseconds timeout{30'000};
  int retry_budget = 2;
  std::chrono::milliseconds initial_backoff{250};

  // Throws InvalidArgument unless timeout > 0 and retry_budget >= 0.
  void Validate() const;
};

enum class Stage { kTranscribe, kRespond, kSynthesize };
std::string_view StageName(Stage stage);  // "transcribe", "respond", "synthesize"

enum class ProviderErrorKind {
  kTimeout,
  kAuthentication,
  kUnsupportedMedia,
  kEmptyTranscript,
  kEmptyCompletion,
  kOversize,
  kUnavailable,  // connection failure, 429, 5xx
  kBadResponse,  // unexpected status or malformed body
};
std::string_view ProviderErrorKindName(ProviderErrorKind kind);

// Timeouts and unavailability are worth retrying; nothing else is.
bool IsTransient(ProviderErrorKind kind);

class ProviderError : public Error {
 public:
  ProviderError(ProviderErrorKind kind, Stage stage, std::string provider,
                const std::string& detail);

  ProviderErrorKind kind() const { return kind_; }
  Stage stage() const { return stage_; }
  const std::string& provider() const { return provider_; }

 private:
  ProviderErrorKind kind_;
  Stage stage_;
  std::string provider_;
};

// Longest reply accepted for synthesis, in Unicode code points.
inline constexpr std::size_t kMaxSynthesisChars = 5000;

// Throws InvalidArgument for an empty reply and ProviderError(kOversize) past
// kMaxSynthesisChars. Every synthesizer runs this before doing any work.
void CheckSynthesisInput(std::string_view reply, std::string_view provider);

// Throws InvalidArgument unless the log holds the seed plus at least one
// candidate turn.
void CheckRespondInput(const ConversationLog& log);

// Chat-completions request body: {"model": ..., "messages": [{"role",
// "content"}, ...]} with roles system/user/assistant, one message per turn.
nlohmann::json ChatRequestBody(const ConversationLog& log, std::string_view model);

// Lower-case hex SHA-256 of a payload.
std::string Sha256Hex(std::string_view bytes);

class Transcriber {
 public:
  virtual ~Transcriber() = default;
  // Returns a non-empty transcript.
  virtual std::string Transcribe(const AudioBlob& audio) = 0;
};

class ChatResponder {
 public:
  virtual ~ChatResponder() = default;
  // Returns a non-empty reply to the last candidate turn given the whole log.
  virtual std::string Respond(const ConversationLog& log) = 0;
};

// Pull-based audio byte stream. Chunks arrive in order; nullopt marks the
// end. NextChunk may throw ProviderError if the source fails mid-stream.
class AudioStream {
 public:
  virtual ~AudioStream() = default;
  virtual MediaType media_type() const = 0;
  virtual std::optional<std::string> NextChunk() = 0;
};

// Concatenates the remaining chunks of a stream.
std::string DrainStream(AudioStream& stream);

class Synthesizer {
 public:
  virtual ~Synthesizer() = default;
  // Failures that happen before the first byte (auth, size, connection) are
  // thrown from here rather than from the stream.
  virtual std::unique_ptr<AudioStream> Synthesize(std::string_view reply) = 0;
};

// Exponential backoff: attempt k (0-based) waits initial_backoff * 2^k,
// capped at max_backoff, before attempt k + 1.
struct RetryPolicy {
  int retry_budget = 0;
  std::chrono::milliseconds initial_backoff{250};
  std::chrono::milliseconds max_backoff{8'000};
  std::function<void(std::chrono::milliseconds)> sleep;

  static RetryPolicy FromConfig(const ProviderConfig& cfg);
  std::chrono::milliseconds BackoffBefore(int retry) const;
};

// Runs fn until it succeeds, throws a non-transient error, or
// retry_budget + 1 attempts have been made.
template <typename Fn>
auto CallWithRetry(const RetryPolicy& policy, Fn&& fn) -> decltype(fn()) {
  for (int attempt = 0;; ++attempt) {
    try {
      return fn();
    } catch (const ProviderError& e) {
      if (!IsTransient(e.kind()) || attempt >= policy.retry_budget) throw;
    }
    const auto wait = policy.BackoffBefore(attempt);
    if (policy.sleep) {
      policy.sleep(wait);
    } else {
      std::this_thread::sleep_for(wait);
    }
  }
}

class RetryingTranscriber : public Transcriber {
 public:
  RetryingTranscriber(std::shared_ptr<Transcriber> inner, RetryPolicy policy)
      : inner_(std::move(inner)), policy_(std::move(policy)) {}
  std::string Transcribe(const AudioBlob& audio) override {
    return CallWithRetry(policy_, [&] { return inner_->Transcribe(audio); });
  }

 private:
  std::shared_ptr<Transcriber> inner_;
  RetryPolicy policy_;
};

class RetryingResponder : public ChatResponder {
 public:
  RetryingResponder(std::shared_ptr<ChatResponder> inner, RetryPolicy policy)
      : inner_(std::move(inner)), policy_(std::move(policy)) {}
  std::string Respond(const ConversationLog& log) override {
    return CallWithRetry(policy_, [&] { return inner_->Respond(log); });
  }

 private:
  std::shared_ptr<ChatResponder> inner_;
  RetryPolicy policy_;
};

class RetryingSynthesizer : public Synthesizer {
 public:
  RetryingSynthesizer(std::shared_ptr<Synthesizer> inner, RetryPolicy policy)
      : inner_(std::move(inner)), policy_(std::move(policy)) {}
  std::unique_ptr<AudioStream> Synthesize(std::string_view reply) override {
    return CallWithRetry(policy_, [&] { return inner_->Synthesize(reply); });
  }

 private:
  std::shared_ptr<Synthesizer> inner_;
  RetryPolicy policy_;
};

// The three providers an interview service runs against.
struct Providers {
  std::shared_ptr<Transcriber> transcriber;
  std::shared_ptr<ChatResponder> responder;
  std::shared_ptr<Synthesizer> synthesizer;
};

}  // namespace equiview

#endif  // EQUIVIEW_PROVIDERS_H_
