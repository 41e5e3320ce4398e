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

#include "equiview/mock_providers.h"

#include <cstdint>
#include <fstream>
#include <iterator>

namespace equiview {

namespace {

void PutLe(std::string& out, std::uint32_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
}

std::string WavHeader(std::uint32_t data_bytes) {
  std::string h;
  h += "RIFF";
  PutLe(h, 36 + data_bytes, 4);
  h += "WAVE";
  h += "fmt ";
  PutLe(h, 16, 4);  // PCM fmt chunk size
  PutLe(h, 1, 2);   // PCM
  PutLe(h, 1, 2);   // mono
  PutLe(h, ToneSynthesizer::kSampleRate, 4);
  PutLe(h, ToneSynthesizer::kSampleRate * 2, 4);  // byte rate
  PutLe(h, 2, 2);                                 // block align
  PutLe(h, 16, 2);                                // bits per sample
  h += "data";
  PutLe(h, data_bytes, 4);
  return h;
}

// Integer triangle wave; the period depends only on the input byte, so the
// output is identical on every platform.
std::string Segment(unsigned char c) {
  const int period = 8 + (c % 32) * 2;  // samples
  constexpr int kAmplitude = 8000;
  std::string out;
  out.reserve(ToneSynthesizer::kSamplesPerSegment * 2);
  for (int n = 0; n < ToneSynthesizer::kSamplesPerSegment; ++n) {
    const int phase = n % period;
    const int half = period / 2;
    const int ramp = phase < half ? phase : period - phase;
    const int sample = (ramp * 4 * kAmplitude) / period - kAmplitude;
    PutLe(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(sample)), 2);
  }
  return out;
}

class ToneStream : public AudioStream {
 public:
  explicit ToneStream(std::string reply) : reply_(std::move(reply)) {}

  MediaType media_type() const override { return MediaType::kWav; }

  std::optional<std::string> NextChunk() override {
    if (!header_sent_) {
      header_sent_ = true;
      return WavHeader(static_cast<std::uint32_t>(
          reply_.size() * ToneSynthesizer::kSamplesPerSegment * 2));
    }
    if (pos_ >= reply_.size()) return std::nullopt;
    return Segment(static_cast<unsigned char>(reply_[pos_++]));
  }

 private:
  std::string reply_;
  bool header_sent_ = false;
  std::size_t pos_ = 0;
};

}  // namespace

void MockControl::FailNext(ProviderErrorKind kind, int times) {
  std::lock_guard lock(mu_);
  fail_kind_ = kind;
  fail_remaining_ = times;
}

void MockControl::EnterCall(Stage stage, const char* provider) {
  ++calls_;
  std::lock_guard lock(mu_);
  if (fail_remaining_ > 0 && fail_kind_) {
    --fail_remaining_;
    throw ProviderError(*fail_kind_, stage, provider, "injected failure");
  }
}

ManifestTranscriber::ManifestTranscriber(std::map<std::string, std::string> by_checksum)
    : by_checksum_(std::move(by_checksum)) {}

std::shared_ptr<ManifestTranscriber> ManifestTranscriber::FromFile(
    const std::filesystem::path& manifest) {
  std::ifstream in(manifest, std::ios::binary);
  if (!in) throw NotFound("transcript manifest not found: " + manifest.string());
  const std::string body((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("<document>", manifest.string() + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw ParseError("<document>", manifest.string() + ": manifest must be an object");
  }
  std::map<std::string, std::string> entries;
  for (const auto& [checksum, text] : doc.items()) {
    if (!text.is_string()) {
      throw ParseError(checksum, manifest.string() + ": entry '" + checksum +
                                     "' must be a string");
    }
    entries[checksum] = text.get<std::string>();
  }
  return std::make_shared<ManifestTranscriber>(std::move(entries));
}

void ManifestTranscriber::Add(std::string_view audio_bytes, std::string transcript) {
  std::lock_guard lock(mu_);
  by_checksum_[Sha256Hex(audio_bytes)] = std::move(transcript);
}

void ManifestTranscriber::SetFallback(std::string transcript) {
  std::lock_guard lock(mu_);
  fallback_ = std::move(transcript);
}

std::string ManifestTranscriber::Transcribe(const AudioBlob& audio) {
  EnterCall(Stage::kTranscribe, "mock-stt");
  const std::string key = Sha256Hex(audio.bytes());
  std::lock_guard lock(mu_);
  auto it = by_checksum_.find(key);
  if (it == by_checksum_.end() && !fallback_.empty()) return fallback_;
  if (it == by_checksum_.end() || it->second.empty()) {
    throw ProviderError(ProviderErrorKind::kEmptyTranscript, Stage::kTranscribe,
                        "mock-stt", "no transcript for payload " + key);
  }
  return it->second;
}

ScriptedResponder::ScriptedResponder(std::vector<std::string> replies, bool cycle)
    : replies_(std::move(replies)), cycle_(cycle) {}

std::string ScriptedResponder::Respond(const ConversationLog& log) {
  CheckRespondInput(log);
  EnterCall(Stage::kRespond, "mock-llm");
  std::lock_guard lock(mu_);
  requests_.push_back(ChatRequestBody(log, "mock"));
  if (cycle_ && !replies_.empty() && next_ >= replies_.size()) next_ = 0;
  if (next_ >= replies_.size() || replies_[next_].empty()) {
    throw ProviderError(ProviderErrorKind::kEmptyCompletion, Stage::kRespond,
                        "mock-llm", "script exhausted");
  }
  return replies_[next_++];
}

std::vector<nlohmann::json> ScriptedResponder::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::size_t ScriptedResponder::remaining() const {
  std::lock_guard lock(mu_);
  return next_ >= replies_.size() ? 0 : replies_.size() - next_;
}

std::unique_ptr<AudioStream> ToneSynthesizer::Synthesize(std::string_view reply) {
  CheckSynthesisInput(reply, "mock-tts");
  EnterCall(Stage::kSynthesize, "mock-tts");
  return std::make_unique<ToneStream>(std::string(reply));
}

std::string ToneSynthesizer::Render(std::string_view reply) {
  ToneStream stream{std::string(reply)};
  return DrainStream(stream);
}

}  // namespace equiview
