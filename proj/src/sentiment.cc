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

#include "equiview/sentiment.h"

#include <cerrno>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>

#include "embedded_data.h"
#include "equiview/error.h"

namespace equiview {

namespace {

bool IsAsciiAlnum(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z');
}

bool IsSentenceEnd(unsigned char c) {
  return c == '.' || c == '!' || c == '?' || c == ';' || c == '\n';
}

// One scanned character class at position i.
enum class CharKind { kWord, kApostrophe, kSeparator };

struct Scanned {
  CharKind kind;
  std::size_t length;
};

Scanned ScanAt(std::string_view text, std::size_t i) {
  const auto c = static_cast<unsigned char>(text[i]);
  if (c < 0x80) {
    if (IsAsciiAlnum(c)) return {CharKind::kWord, 1};
    if (c == '\'') return {CharKind::kApostrophe, 1};
    return {CharKind::kSeparator, 1};
  }
  std::size_t len = 1;
  if ((c & 0xE0) == 0xC0) {
    len = 2;
  } else if ((c & 0xF0) == 0xE0) {
    len = 3;
  } else if ((c & 0xF8) == 0xF0) {
    len = 4;
  }
  if (i + len > text.size()) return {CharKind::kSeparator, text.size() - i};
  const auto c1 = static_cast<unsigned char>(text[i + 1]);
  if (len == 2 && c == 0xC2 && c1 == 0xA0) return {CharKind::kSeparator, 2};
  if (len == 3 && c == 0xE2 && (c1 == 0x80 || c1 == 0x81)) {
    const auto c2 = static_cast<unsigned char>(text[i + 2]);
    if (c1 == 0x80 && c2 == 0x99) return {CharKind::kApostrophe, 3};
    return {CharKind::kSeparator, 3};
  }
  return {CharKind::kWord, len};
}

// Walks `text` and invokes on_token(token) for each token and
// on_sentence_end() at each sentence boundary.
template <typename OnToken, typename OnSentenceEnd>
void Scan(std::string_view text, OnToken on_token, OnSentenceEnd on_sentence_end) {
  std::string token;
  std::size_t i = 0;
  while (i < text.size()) {
    const Scanned s = ScanAt(text, i);
    switch (s.kind) {
      case CharKind::kWord:
        for (std::size_t k = 0; k < s.length; ++k) {
          const auto c = static_cast<unsigned char>(text[i + k]);
          token.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c + 32)
                                               : static_cast<char>(c));
        }
        break;
      case CharKind::kApostrophe: {
        const std::size_t next = i + s.length;
        const bool inside = !token.empty() && next < text.size() &&
                            ScanAt(text, next).kind == CharKind::kWord;
        if (inside) {
          token.push_back('\'');
        } else if (!token.empty()) {
          on_token(token);
          token.clear();
        }
        break;
      }
      case CharKind::kSeparator: {
        if (!token.empty()) {
          on_token(token);
          token.clear();
        }
        const auto c = static_cast<unsigned char>(text[i]);
        // A period between digits is a decimal point, not a sentence end.
        const bool decimal_point =
            c == '.' && i > 0 && i + 1 < text.size() &&
            std::isdigit(static_cast<unsigned char>(text[i - 1])) &&
            std::isdigit(static_cast<unsigned char>(text[i + 1]));
        if (s.length == 1 && IsSentenceEnd(c) && !decimal_point) {
          on_sentence_end();
        }
        break;
      }
    }
    i += s.length;
  }
  if (!token.empty()) on_token(token);
}

struct Accumulated {
  double sum = 0.0;
  std::size_t matched = 0;
};

Accumulated Accumulate(std::string_view text, const Lexicon& lexicon) {
  Accumulated acc;
  bool negate = false;
  Scan(
      text,
      [&](const std::string& token) {
        if (lexicon.IsNegator(token)) {
          negate = !negate;
          return;
        }
        if (const double* p = lexicon.Find(token)) {
          acc.sum += negate ? -*p : *p;
          ++acc.matched;
          negate = false;
        }
      },
      [&] { negate = false; });
  return acc;
}

PolarityReport MakeReport(const Accumulated& acc, std::size_t turns,
                          Thresholds thresholds) {
  PolarityReport report;
  report.matched_token_count = acc.matched;
  report.turns_analyzed = turns;
  report.score = acc.matched == 0 ? 0.0 : acc.sum / static_cast<double>(acc.matched);
  report.label = Classify(report.score, thresholds);
  return report;
}

void ValidateToken(std::string_view token) {
  if (token.empty()) throw InvalidArgument("lexicon token is empty");
  for (char ch : token) {
    const auto c = static_cast<unsigned char>(ch);
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
        c == '\f') {
      throw InvalidArgument("lexicon token '" + std::string(token) +
                            "' contains whitespace");
    }
    if (c >= 'A' && c <= 'Z') {
      throw InvalidArgument("lexicon token '" + std::string(token) +
                            "' is not lowercase");
    }
  }
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

Lexicon::Lexicon(std::map<std::string, double, std::less<>> entries,
                 std::set<std::string, std::less<>> negators)
    : entries_(std::move(entries)), negators_(std::move(negators)) {
  for (const auto& [token, polarity] : entries_) {
    ValidateToken(token);
    if (!std::isfinite(polarity) || polarity < -1.0 || polarity > 1.0) {
      throw InvalidArgument("polarity of '" + token + "' is outside [-1, 1]");
    }
  }
  for (const auto& token : negators_) ValidateToken(token);
}

const double* Lexicon::Find(std::string_view token) const {
  auto it = entries_.find(token);
  return it == entries_.end() ? nullptr : &it->second;
}

Lexicon ParseLexicon(std::string_view text, std::string_view source) {
  std::map<std::string, double, std::less<>> entries;
  std::set<std::string, std::less<>> negators;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;

    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    line = Trim(line);
    if (line.empty() || line.front() == '#') continue;

    const std::size_t tab = line.find('\t');
    std::string_view token = Trim(line.substr(0, tab));
    std::string_view value =
        tab == std::string_view::npos ? std::string_view{} : Trim(line.substr(tab + 1));

    try {
      if (token.front() == '!') {
        token.remove_prefix(1);
        ValidateToken(token);
        negators.emplace(token);
        continue;
      }
      ValidateToken(token);
    } catch (const InvalidArgument& e) {
      throw ParseError(where, where + ": " + e.what());
    }
    if (value.empty()) {
      throw ParseError(where, where + ": missing polarity for '" +
                                  std::string(token) + "'");
    }
    const std::string value_str(value);
    char* end = nullptr;
    errno = 0;
    const double polarity = std::strtod(value_str.c_str(), &end);
    if (end != value_str.c_str() + value_str.size() || errno == ERANGE) {
      throw ParseError(where, where + ": bad polarity '" + value_str + "'");
    }
    if (!std::isfinite(polarity) || polarity < -1.0 || polarity > 1.0) {
      throw ParseError(where, where + ": polarity " + value_str +
                                  " is outside [-1, 1]");
    }
    entries[std::string(token)] = polarity;
  }
  return Lexicon(std::move(entries), std::move(negators));
}

Lexicon LoadLexicon(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("lexicon not found: " + path.string());
  const std::string body((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  return ParseLexicon(body, path.string());
}

const Lexicon& DefaultLexicon() {
  static const Lexicon lexicon =
      ParseLexicon(internal::EmbeddedLexiconTsv(), "default_lexicon.tsv");
  return lexicon;
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  Scan(
      text, [&](const std::string& token) { tokens.push_back(token); }, [] {});
  return tokens;
}

double ScoreText(std::string_view text, const Lexicon& lexicon) {
  const Accumulated acc = Accumulate(text, lexicon);
  return acc.matched == 0 ? 0.0 : acc.sum / static_cast<double>(acc.matched);
}

std::string_view PolarityName(Polarity polarity) {
  switch (polarity) {
    case Polarity::kPositive:
      return "positive";
    case Polarity::kNegative:
      return "negative";
    case Polarity::kNeutral:
      return "neutral";
  }
  return "neutral";
}

Polarity Classify(double score, Thresholds thresholds) {
  if (!(thresholds.negative < thresholds.positive)) {
    throw InvalidArgument("negative threshold must be below positive threshold");
  }
  if (score > thresholds.positive) return Polarity::kPositive;
  if (score < thresholds.negative) return Polarity::kNegative;
  return Polarity::kNeutral;
}

PolarityReport AnalyzeText(std::string_view text, const Lexicon& lexicon,
                           Thresholds thresholds) {
  return MakeReport(Accumulate(text, lexicon), text.empty() ? 0 : 1, thresholds);
}

PolarityReport AnalyzeLog(const ConversationLog& log, const Lexicon& lexicon,
                          Thresholds thresholds) {
  std::string joined;
  std::size_t turns = 0;
  for (const Turn& turn : log.turns()) {
    if (turn.role != Role::kCandidate) continue;
    if (turns > 0) joined.push_back('\n');
    joined += turn.text;
    ++turns;
  }
  return MakeReport(Accumulate(joined, lexicon), turns, thresholds);
}

nlohmann::json ReportToJson(const PolarityReport& report) {
  return nlohmann::json{{"score", report.score},
                        {"label", PolarityName(report.label)},
                        {"matched_tokens", report.matched_token_count},
                        {"turns_analyzed", report.turns_analyzed}};
}

}  // namespace equiview
