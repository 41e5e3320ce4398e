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

// Lexicon-based polarity scoring.
//
// A text's score is the arithmetic mean of the polarities of the tokens found
// in the lexicon. A negator token flips the sign of the next matched token in
// the same sentence; consecutive negators toggle. Negators are never scored
// themselves. Sentences end at '.', '!', '?', ';' and newlines.

#ifndef EQUIVIEW_SENTIMENT_H_
#define EQUIVIEW_SENTIMENT_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "equiview/conversation.h"
#include "json.hpp"

namespace equiview {

class Lexicon {
 public:
  // Throws InvalidArgument when a polarity is outside [-1, 1] or not finite,
  // or a token is empty, has whitespace or upper-case ASCII.
  Lexicon(std::map<std::string, double, std::less<>> entries,
          std::set<std::string, std::less<>> negators);

  const std::map<std::string, double, std::less<>>& entries() const {
    return entries_;
  }
  const std::set<std::string, std::less<>>& negators() const {
    return negators_;
  }

  const double* Find(std::string_view token) const;
  bool IsNegator(std::string_view token) const {
    return negators_.find(token) != negators_.end();
  }

 private:
  std::map<std::string, double, std::less<>> entries_;
  std::set<std::string, std::less<>> negators_;
};

// Parses the tab-separated lexicon format:
//   # comment
//   great<TAB>0.8
//   !not
// `source` only labels error messages. Throws ParseError naming the line.
Lexicon ParseLexicon(std::string_view text, std::string_view source = "<lexicon>");
Lexicon LoadLexicon(const std::filesystem::path& path);

// The curated table shipped in data/default_lexicon.tsv.
const Lexicon& DefaultLexicon();

// Lower-cased tokens split on any run of non-alphanumeric characters. An
// apostrophe (ASCII or U+2019) between two word characters stays inside the
// token and is normalized to ASCII. Non-ASCII characters count as word
// characters except the U+2000..U+206F punctuation block and U+00A0.
std::vector<std::string> Tokenize(std::string_view text);

// Mean signed polarity of the matched tokens; 0.0 when nothing matches.
double ScoreText(std::string_view text, const Lexicon& lexicon);

enum class Polarity { kPositive, kNegative, kNeutral };
std::string_view PolarityName(Polarity polarity);

struct Thresholds {
  double negative = -0.05;
  double positive = 0.05;
};

// Positive iff score > positive, Negative iff score < negative.
// Throws InvalidArgument unless negative < positive.
Polarity Classify(double score, Thresholds thresholds = {});

struct PolarityReport {
  double score = 0.0;
  Polarity label = Polarity::kNeutral;
  std::size_t matched_token_count = 0;
  std::size_t turns_analyzed = 0;

  bool operator==(const PolarityReport&) const = default;
};

// Scores `text` as a single candidate utterance (turns_analyzed = 1 unless
// the text is empty).
PolarityReport AnalyzeText(std::string_view text, const Lexicon& lexicon,
                           Thresholds thresholds = {});

// Scores the candidate turns only. Turn boundaries end sentences, so a
// trailing negator never carries into the next turn.
PolarityReport AnalyzeLog(const ConversationLog& log, const Lexicon& lexicon,
                          Thresholds thresholds = {});

// {"score", "label", "matched_tokens", "turns_analyzed"}
nlohmann::json ReportToJson(const PolarityReport& report);

}  // namespace equiview

#endif  // EQUIVIEW_SENTIMENT_H_
