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

#include "equiview/http_providers.h"

#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <mutex>
#include <thread>

#include "httplib.h"

namespace equiview {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::size_t kMaxQueuedChunks = 64;
constexpr std::size_t kMaxErrorBody = 4096;

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix without trailing slash
};

Endpoint SplitBaseUrl(const std::string& base_url) {
  const std::size_t scheme = base_url.find("://");
  if (scheme == std::string::npos) {
    throw InvalidArgument("provider base URL lacks a scheme: '" + base_url + "'");
  }
  const std::size_t path = base_url.find('/', scheme + 3);
  Endpoint ep;
  ep.origin = base_url.substr(0, path);
  if (path != std::string::npos) ep.prefix = base_url.substr(path);
  while (!ep.prefix.empty() && ep.prefix.back() == '/') ep.prefix.pop_back();
  return ep;
}

std::unique_ptr<httplib::Client> MakeClient(const ProviderConfig& cfg,
                                            const Endpoint& ep) {
  auto cli = std::make_unique<httplib::Client>(ep.origin);
  cli->set_connection_timeout(cfg.timeout);
  cli->set_read_timeout(cfg.timeout);
  cli->set_write_timeout(cfg.timeout);
  return cli;
}

ProviderErrorKind KindForStatus(int status) {
  if (status == 401 || status == 403) return ProviderErrorKind::kAuthentication;
  if (status == 408 || status == 504) return ProviderErrorKind::kTimeout;
  if (status == 413) return ProviderErrorKind::kOversize;
  if (status == 415) return ProviderErrorKind::kUnsupportedMedia;
  if (status == 429 || status >= 500) return ProviderErrorKind::kUnavailable;
  return ProviderErrorKind::kBadResponse;
}

ProviderError StatusError(int status, const std::string& body, Stage stage,
                          const char* provider) {
  std::string detail = "HTTP " + std::to_string(status);
  if (!body.empty()) detail += ": " + body.substr(0, 200);
  return ProviderError(KindForStatus(status), stage, provider, detail);
}

// httplib reports a read timeout as a plain read error; the elapsed time
// tells the two apart.
ProviderError TransportError(httplib::Error err, Clock::duration elapsed,
                             const ProviderConfig& cfg, Stage stage,
                             const char* provider) {
  const bool timed_out =
      err == httplib::Error::ConnectionTimeout ||
      ((err == httplib::Error::Read || err == httplib::Error::Write) &&
       elapsed >= cfg.timeout * 9 / 10);
  return ProviderError(
      timed_out ? ProviderErrorKind::kTimeout : ProviderErrorKind::kUnavailable,
      stage, provider, httplib::to_string(err));
}

nlohmann::json ParseJsonBody(const std::string& body, Stage stage,
                             const char* provider) {
  try {
    return nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error&) {
    throw ProviderError(ProviderErrorKind::kBadResponse, stage, provider,
                        "response is not JSON");
  }
}

bool IsBlank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

std::string_view FileNameFor(MediaType type) {
  switch (type) {
    case MediaType::kWav:
      return "audio.wav";
    case MediaType::kMpeg:
      return "audio.mp3";
    case MediaType::kWebm:
      return "audio.webm";
  }
  return "audio.bin";
}

// Shared between the reader thread and the consumer.
struct StreamState {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::string> chunks;
  int status = 0;
  bool headers_ok = false;
  bool finished = false;
  bool cancelled = false;
  MediaType media_type = MediaType::kMpeg;
  std::string error_body;
  std::optional<ProviderError> error;
};

class HttpAudioStream : public AudioStream {
 public:
  HttpAudioStream(std::shared_ptr<StreamState> state, std::thread worker)
      : state_(std::move(state)), worker_(std::move(worker)) {}

  ~HttpAudioStream() override {
    {
      std::lock_guard lock(state_->mu);
      state_->cancelled = true;
    }
    state_->cv.notify_all();
    if (worker_.joinable()) worker_.join();
  }

  MediaType media_type() const override { return state_->media_type; }

  std::optional<std::string> NextChunk() override {
    std::unique_lock lock(state_->mu);
    state_->cv.wait(lock, [&] { return !state_->chunks.empty() || state_->finished; });
    if (!state_->chunks.empty()) {
      std::string chunk = std::move(state_->chunks.front());
      state_->chunks.pop_front();
      state_->cv.notify_all();
      return chunk;
    }
    if (state_->error) throw *state_->error;
    return std::nullopt;
  }

 private:
  std::shared_ptr<StreamState> state_;
  std::thread worker_;
};

const char* EnvOrNull(const std::function<const char*(const char*)>& getenv,
                      const std::string& name) {
  const char* v = getenv ? getenv(name.c_str()) : std::getenv(name.c_str());
  return v && *v ? v : nullptr;
}

}  // namespace

OpenAiTranscriber::OpenAiTranscriber(ProviderConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.Validate();
}

std::string OpenAiTranscriber::Transcribe(const AudioBlob& audio) {
  constexpr const char* kProvider = "openai-stt";
  const Endpoint ep = SplitBaseUrl(cfg_.base_url);
  auto cli = MakeClient(cfg_, ep);

  httplib::MultipartFormDataItems items = {
      {"file", audio.bytes(), std::string(FileNameFor(audio.media_type())),
       std::string(MediaTypeName(audio.media_type()))},
      {"model", cfg_.model, "", ""},
  };
  httplib::Headers headers = {{"Authorization", "Bearer " + cfg_.credential}};
  const auto start = Clock::now();
  auto res = cli->Post(ep.prefix + "/v1/audio/transcriptions", headers, items);
  if (!res) {
    throw TransportError(res.error(), Clock::now() - start, cfg_,
                         Stage::kTranscribe, kProvider);
  }
  if (res->status < 200 || res->status >= 300) {
    throw StatusError(res->status, res->body, Stage::kTranscribe, kProvider);
  }
  const auto doc = ParseJsonBody(res->body, Stage::kTranscribe, kProvider);
  auto text = doc.find("text");
  if (!doc.is_object() || text == doc.end() || !text->is_string()) {
    throw ProviderError(ProviderErrorKind::kBadResponse, Stage::kTranscribe,
                        kProvider, "response lacks a 'text' string");
  }
  std::string transcript = text->get<std::string>();
  if (IsBlank(transcript)) {
    throw ProviderError(ProviderErrorKind::kEmptyTranscript, Stage::kTranscribe,
                        kProvider, "no speech recognized");
  }
  return transcript;
}

OpenAiChatResponder::OpenAiChatResponder(ProviderConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.Validate();
}

std::string OpenAiChatResponder::Respond(const ConversationLog& log) {
  constexpr const char* kProvider = "openai-chat";
  CheckRespondInput(log);
  const Endpoint ep = SplitBaseUrl(cfg_.base_url);
  auto cli = MakeClient(cfg_, ep);

  httplib::Headers headers = {{"Authorization", "Bearer " + cfg_.credential}};
  const std::string body = ChatRequestBody(log, cfg_.model).dump();
  const auto start = Clock::now();
  auto res = cli->Post(ep.prefix + "/v1/chat/completions", headers, body,
                       "application/json");
  if (!res) {
    throw TransportError(res.error(), Clock::now() - start, cfg_, Stage::kRespond,
                         kProvider);
  }
  if (res->status < 200 || res->status >= 300) {
    throw StatusError(res->status, res->body, Stage::kRespond, kProvider);
  }
  const auto doc = ParseJsonBody(res->body, Stage::kRespond, kProvider);
  const nlohmann::json* content = nullptr;
  if (doc.is_object() && doc.contains("choices") && doc["choices"].is_array() &&
      !doc["choices"].empty()) {
    const auto& choice = doc["choices"][0];
    if (choice.is_object() && choice.contains("message") &&
        choice["message"].is_object() && choice["message"].contains("content")) {
      content = &choice["message"]["content"];
    }
  }
  if (content == nullptr || !(content->is_string() || content->is_null())) {
    throw ProviderError(ProviderErrorKind::kBadResponse, Stage::kRespond, kProvider,
                        "response lacks choices[0].message.content");
  }
  if (content->is_null() || IsBlank(content->get<std::string>())) {
    throw ProviderError(ProviderErrorKind::kEmptyCompletion, Stage::kRespond,
                        kProvider, "completion is empty");
  }
  return content->get<std::string>();
}

ElevenLabsSynthesizer::ElevenLabsSynthesizer(ProviderConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.Validate();
}

std::unique_ptr<AudioStream> ElevenLabsSynthesizer::Synthesize(std::string_view reply) {
  constexpr const char* kProvider = "elevenlabs-tts";
  CheckSynthesisInput(reply, kProvider);
  const Endpoint ep = SplitBaseUrl(cfg_.base_url);

  auto state = std::make_shared<StreamState>();
  const std::string path = ep.prefix + "/v1/text-to-speech/" + cfg_.model;
  const std::string body = nlohmann::json{{"text", reply}}.dump();

  std::thread worker([state, cfg = cfg_, ep, path, body] {
    auto cli = MakeClient(cfg, ep);
    httplib::Request req;
    req.method = "POST";
    req.path = path;
    req.headers = {{"xi-api-key", cfg.credential},
                   {"Accept", "audio/mpeg"},
                   {"Content-Type", "application/json"}};
    req.body = body;
    req.response_handler = [&](const httplib::Response& res) {
      std::lock_guard lock(state->mu);
      state->status = res.status;
      if (res.status >= 200 && res.status < 300) {
        state->headers_ok = true;
        state->media_type = ParseMediaType(res.get_header_value("Content-Type"))
                                .value_or(MediaType::kMpeg);
        state->cv.notify_all();
      }
      return !state->cancelled;
    };
    req.content_receiver = [&](const char* data, std::size_t len, std::uint64_t,
                               std::uint64_t) {
      std::unique_lock lock(state->mu);
      if (state->cancelled) return false;
      if (!state->headers_ok) {
        if (state->error_body.size() < kMaxErrorBody) state->error_body.append(data, len);
        return true;
      }
      state->cv.wait(lock, [&] {
        return state->chunks.size() < kMaxQueuedChunks || state->cancelled;
      });
      if (state->cancelled) return false;
      state->chunks.emplace_back(data, len);
      state->cv.notify_all();
      return true;
    };

    const auto start = Clock::now();
    auto res = cli->send(req);
    std::lock_guard lock(state->mu);
    if (!state->cancelled) {
      if (!res) {
        state->error = TransportError(res.error(), Clock::now() - start, cfg,
                                      Stage::kSynthesize, kProvider);
      } else if (!state->headers_ok) {
        state->error = StatusError(res->status, state->error_body,
                                   Stage::kSynthesize, kProvider);
      }
    }
    state->finished = true;
    state->cv.notify_all();
  });

  {
    std::unique_lock lock(state->mu);
    state->cv.wait(lock, [&] { return state->headers_ok || state->finished; });
    if (!state->headers_ok) {
      lock.unlock();
      worker.join();
      if (state->error) throw *state->error;
      throw ProviderError(ProviderErrorKind::kBadResponse, Stage::kSynthesize,
                          kProvider, "no response");
    }
  }
  return std::make_unique<HttpAudioStream>(std::move(state), std::move(worker));
}

ProviderConfig ConfigFromEnv(ProviderService service,
                             const std::function<const char*(const char*)>& getenv) {
  ProviderConfig cfg;
  std::string prefix;
  switch (service) {
    case ProviderService::kStt:
      prefix = "EQUIVIEW_STT";
      cfg.base_url = "https://api.openai.com";
      cfg.model = "whisper-1";
      break;
    case ProviderService::kLlm:
      prefix = "EQUIVIEW_LLM";
      cfg.base_url = "https://api.openai.com";
      cfg.model = "gpt-3.5-turbo";
      break;
    case ProviderService::kTts:
      prefix = "EQUIVIEW_TTS";
      cfg.base_url = "https://api.elevenlabs.io";
      cfg.model = "21m00Tcm4TlvDq8ikWAM";
      break;
  }
  if (const char* v = EnvOrNull(getenv, prefix + "_KEY")) cfg.credential = v;
  if (const char* v = EnvOrNull(getenv, prefix + "_BASE_URL")) cfg.base_url = v;
  if (const char* v = EnvOrNull(getenv, prefix + "_MODEL")) cfg.model = v;
  return cfg;
}

Providers MakeHttpProviders(const ProviderConfig& stt, const ProviderConfig& llm,
                            const ProviderConfig& tts) {
  std::string missing;
  auto require = [&](const ProviderConfig& cfg, const char* var) {
    if (cfg.credential.empty()) missing += missing.empty() ? var : std::string(", ") + var;
  };
  require(stt, "EQUIVIEW_STT_KEY");
  require(llm, "EQUIVIEW_LLM_KEY");
  require(tts, "EQUIVIEW_TTS_KEY");
  if (!missing.empty()) {
    throw InvalidArgument("missing provider credentials: " + missing +
                          " (or run with --mock-providers)");
  }
  Providers p;
  p.transcriber = std::make_shared<RetryingTranscriber>(
      std::make_shared<OpenAiTranscriber>(stt), RetryPolicy::FromConfig(stt));
  p.responder = std::make_shared<RetryingResponder>(
      std::make_shared<OpenAiChatResponder>(llm), RetryPolicy::FromConfig(llm));
  p.synthesizer = std::make_shared<RetryingSynthesizer>(
      std::make_shared<ElevenLabsSynthesizer>(tts), RetryPolicy::FromConfig(tts));
  return p;
}

}  // namespace equiview
