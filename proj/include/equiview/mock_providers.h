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

// Deterministic offline providers. Same inputs always give the same bytes.
//
// Each mock counts calls and can be told to fail its next N calls with a
// given error kind, which is how tests force a pipeline stage to fail or
// exercise the retry decorators.

#ifndef EQUIVIEW_MOCK_PROVIDERS_H_
#define EQUIVIEW_MOCK_PROVIDERS_H_

#include <atomic>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "equiview/providers.h"

namespace equiview {

// Shared failure injection and call counting.
class MockControl {
 public:
  void FailNext(ProviderErrorKind kind, int times = 1);
  int calls() const { return calls_.load(); }

 protected:
  // Counts the call and throws an injected failure if one is pending.
  void EnterCall(Stage stage, const char* provider);

 private:
  std::atomic<int> calls_{0};
  std::mutex mu_;
  std::optional<ProviderErrorKind> fail_kind_;
  int fail_remaining_ = 0;
};

// Maps payload SHA-256 to a transcript. The manifest is a JSON object
// {"<sha256 hex>": "transcript", ...}, usually a sidecar of the fixture
// audio directory.
class ManifestTranscriber : public Transcriber, public MockControl {
 public:
  ManifestTranscriber() = default;
  explicit ManifestTranscriber(std::map<std::string, std::string> by_checksum);

  // Throws NotFound or ParseError.
  static std::shared_ptr<ManifestTranscriber> FromFile(
      const std::filesystem::path& manifest);

  void Add(std::string_view audio_bytes, std::string transcript);

  // Transcript returned for payloads missing from the manifest. Off by
  // default; the offline demo server uses it so live recordings get through.
  void SetFallback(std::string transcript);

  // Throws ProviderError(kEmptyTranscript) for payloads not in the manifest
  // when no fallback is set.
  std::string Transcribe(const AudioBlob& audio) override;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::string> by_checksum_;
  std::string fallback_;
};

// Replays a fixed queue of replies. Once the queue is exhausted every call
// fails with kEmptyCompletion, unless constructed with cycle = true.
class ScriptedResponder : public ChatResponder, public MockControl {
 public:
  explicit ScriptedResponder(std::vector<std::string> replies, bool cycle = false);

  std::string Respond(const ConversationLog& log) override;

  // Request bodies seen so far, as they would go over the chat wire.
  std::vector<nlohmann::json> requests() const;
  std::size_t remaining() const;

 private:
  mutable std::mutex mu_;
  std::vector<std::string> replies_;
  std::size_t next_ = 0;
  bool cycle_;
  std::vector<nlohmann::json> requests_;
};

// Renders each byte of the reply as a short triangle-wave tone, emitted as a
// 16-bit mono PCM WAV. The stream yields the header first and then one chunk
// per segment, so "abc" produces a header plus three segments.
class ToneSynthesizer : public Synthesizer, public MockControl {
 public:
  static constexpr int kSampleRate = 8000;
  static constexpr int kSamplesPerSegment = 320;  // 40 ms
  static constexpr std::size_t kHeaderBytes = 44;

  std::unique_ptr<AudioStream> Synthesize(std::string_view reply) override;

  // The complete WAV file for `reply`, without the stream wrapper.
  static std::string Render(std::string_view reply);
};

}  // namespace equiview

#endif  // EQUIVIEW_MOCK_PROVIDERS_H_
