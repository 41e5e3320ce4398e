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

#include "equiview/providers.h"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <memory>

namespace equiview {

std::string_view MediaTypeName(MediaType type) {
  switch (type) {
    case MediaType::kWav:
      return "audio/wav";
    case MediaType::kMpeg:
      return "audio/mpeg";
    case MediaType::kWebm:
      return "audio/webm";
  }
  return "application/octet-stream";
}

std::optional<MediaType> ParseMediaType(std::string_view content_type) {
  const std::size_t semi = content_type.find(';');
  std::string base(content_type.substr(0, semi));
  base.erase(std::remove_if(base.begin(), base.end(),
                            [](char c) { return c == ' ' || c == '\t'; }),
             base.end());
  std::transform(base.begin(), base.end(), base.begin(), [](char c) {
    return c >= 'A' && c <= 'Z' ? static_cast<char>(c + 32) : c;
  });
  if (base == "audio/wav" || base == "audio/x-wav" || base == "audio/wave") {
    return MediaType::kWav;
  }
  if (base == "audio/mpeg" || base == "audio/mp3") return MediaType::kMpeg;
  if (base == "audio/webm") return MediaType::kWebm;
  return std::nullopt;
}

AudioBlob::AudioBlob(std::string bytes, MediaType media_type,
                     std::optional<double> duration_hint)
    : bytes_(std::move(bytes)),
      media_type_(media_type),
      duration_hint_(duration_hint) {
  if (bytes_.empty()) throw InvalidArgument("audio payload is empty");
}

void ProviderConfig::Validate() const {
  if (timeout.count() <= 0) throw InvalidArgument("provider timeout must be positive");
  if (retry_budget < 0) throw InvalidArgument("retry budget must be non-negative");
}

std::string_view StageName(Stage stage) {
  switch (stage) {
    case Stage::kTranscribe:
      return "transcribe";
    case Stage::kRespond:
      return "respond";
    case Stage::kSynthesize:
      return "synthesize";
  }
  return "unknown";
}

std::string_view ProviderErrorKindName(ProviderErrorKind kind) {
  switch (kind) {
    case ProviderErrorKind::kTimeout:
      return "timeout";
    case ProviderErrorKind::kAuthentication:
      return "authentication";
    case ProviderErrorKind::kUnsupportedMedia:
      return "unsupported-media";
    case ProviderErrorKind::kEmptyTranscript:
      return "empty-transcript";
    case ProviderErrorKind::kEmptyCompletion:
      return "empty-completion";
    case ProviderErrorKind::kOversize:
      return "oversize";
    case ProviderErrorKind::kUnavailable:
      return "unavailable";
    case ProviderErrorKind::kBadResponse:
      return "bad-response";
  }
  return "unknown";
}

bool IsTransient(ProviderErrorKind kind) {
  return kind == ProviderErrorKind::kTimeout ||
         kind == ProviderErrorKind::kUnavailable;
}

ProviderError::ProviderError(ProviderErrorKind kind, Stage stage,
                             std::string provider, const std::string& detail)
    : Error(std::string(StageName(stage)) + " via " + provider + ": " +
            std::string(ProviderErrorKindName(kind)) +
            (detail.empty() ? "" : " (" + detail + ")")),
      kind_(kind),
      stage_(stage),
      provider_(std::move(provider)) {}

void CheckSynthesisInput(std::string_view reply, std::string_view provider) {
  if (reply.empty()) throw InvalidArgument("synthesis text is empty");
  const auto code_points = static_cast<std::size_t>(
      std::count_if(reply.begin(), reply.end(), [](char c) {
        return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
      }));
  if (code_points > kMaxSynthesisChars) {
    throw ProviderError(ProviderErrorKind::kOversize, Stage::kSynthesize,
                        std::string(provider),
                        std::to_string(code_points) + " characters exceeds the " +
                            std::to_string(kMaxSynthesisChars) + "-character limit");
  }
}

void CheckRespondInput(const ConversationLog& log) {
  const auto turns = log.turns();
  const bool has_candidate =
      std::any_of(turns.begin(), turns.end(),
                  [](const Turn& t) { return t.role == Role::kCandidate; });
  if (!has_candidate) {
    throw InvalidArgument("chat request needs at least one candidate turn");
  }
}

nlohmann::json ChatRequestBody(const ConversationLog& log, std::string_view model) {
  nlohmann::json messages = nlohmann::json::array();
  for (const Turn& t : log.turns()) {
    std::string_view role;
    switch (t.role) {
      case Role::kSystem:
        role = "system";
        break;
      case Role::kCandidate:
        role = "user";
        break;
      case Role::kAssistant:
        role = "assistant";
        break;
    }
    messages.push_back({{"role", role}, {"content", t.text}});
  }
  return {{"model", model}, {"messages", std::move(messages)}};
}

std::string Sha256Hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0x0F]);
  }
  return out;
}

std::string DrainStream(AudioStream& stream) {
  std::string out;
  while (auto chunk = stream.NextChunk()) out += *chunk;
  return out;
}

RetryPolicy RetryPolicy::FromConfig(const ProviderConfig& cfg) {
  cfg.Validate();
  RetryPolicy policy;
  policy.retry_budget = cfg.retry_budget;
  policy.initial_backoff = cfg.initial_backoff;
  return policy;
}

std::chrono::milliseconds RetryPolicy::BackoffBefore(int retry) const {
  auto wait = initial_backoff;
  for (int i = 0; i < retry && wait < max_backoff; ++i) wait *= 2;
  return std::min(wait, max_backoff);
}

}  // namespace equiview
