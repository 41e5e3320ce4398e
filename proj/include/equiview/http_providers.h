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

// HTTP clients for hosted providers.
//
//   STT  POST {base}/v1/audio/transcriptions   multipart (file, model),
//        "Authorization: Bearer <key>", response {"text": ...}
//   Chat POST {base}/v1/chat/completions       {"model", "messages"},
//        "Authorization: Bearer <key>", reply = choices[0].message.content
//   TTS  POST {base}/v1/text-to-speech/{voice} {"text"}, "xi-api-key: <key>",
//        response body is the audio stream
//
// Each call opens its own connection, so one client object may be shared
// by any number of threads. A client makes exactly one attempt per call;
// wrap it in the Retrying* decorators for retries (MakeHttpProviders does).

#ifndef EQUIVIEW_HTTP_PROVIDERS_H_
#define EQUIVIEW_HTTP_PROVIDERS_H_

#include <functional>
#include <memory>
#include <string>

#include "equiview/providers.h"

namespace equiview {

class OpenAiTranscriber : public Transcriber {
 public:
  explicit OpenAiTranscriber(ProviderConfig cfg);
  std::string Transcribe(const AudioBlob& audio) override;

 private:
  ProviderConfig cfg_;
};

class OpenAiChatResponder : public ChatResponder {
 public:
  explicit OpenAiChatResponder(ProviderConfig cfg);
  std::string Respond(const ConversationLog& log) override;

 private:
  ProviderConfig cfg_;
};

// Streams the response body as it arrives; a background thread reads the
// connection into a bounded queue that the returned stream drains.
class ElevenLabsSynthesizer : public Synthesizer {
 public:
  explicit ElevenLabsSynthesizer(ProviderConfig cfg);
  std::unique_ptr<AudioStream> Synthesize(std::string_view reply) override;

 private:
  ProviderConfig cfg_;
};

enum class ProviderService { kStt, kLlm, kTts };

// Reads EQUIVIEW_<STT|LLM|TTS>_KEY, _BASE_URL and _MODEL through `getenv`
// (injectable for tests), falling back to the hosted defaults.
ProviderConfig ConfigFromEnv(
    ProviderService service,
    const std::function<const char*(const char*)>& getenv = nullptr);

// Real clients behind retry decorators. Throws InvalidArgument naming every
// missing credential variable.
Providers MakeHttpProviders(const ProviderConfig& stt, const ProviderConfig& llm,
                            const ProviderConfig& tts);

}  // namespace equiview

#endif  // EQUIVIEW_HTTP_PROVIDERS_H_
