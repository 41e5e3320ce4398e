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

// The five-level knowledge rubric, the system prompt that seeds each
// interview, and recovery of the numeric rating from assistant replies.

#ifndef EQUIVIEW_RUBRIC_H_
#define EQUIVIEW_RUBRIC_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "equiview/error.h"

namespace equiview {

// A knowledge assessment in [1.0, 5.0]. Decimal values are allowed.
class Rating {
 public:
  static constexpr double kMin = 1.0;
  static constexpr double kMax = 5.0;

  // Throws ValidationError outside [kMin, kMax] (NaN included).
  explicit Rating(double value);

  static bool InRange(double value) { return value >= kMin && value <= kMax; }

  double value() const { return value_; }
  auto operator<=>(const Rating&) const = default;

 private:
  double value_;
};

struct KnowledgeLevel {
  int level;
  std::string_view name;
  std::string_view description;
};

inline constexpr std::string_view kRubricVersion = "rubric/1";
inline constexpr std::string_view kDefaultQuestion = "49*54";

// The message sent as the last candidate turn to obtain the final rating.
inline constexpr std::string_view kRatingRequest =
    "The interview is complete. Based on the scale you were given, what is "
    "your final rating for this candidate? Reply with the number only.";

// Levels 1..5 in ascending order.
std::span<const KnowledgeLevel> KnowledgeLevels();

// Throws InvalidArgument unless 1 <= level <= 5.
const KnowledgeLevel& LevelFor(int level);

// System prompt: interviewer instructions, the five numbered level
// definitions, the rating instruction and the question to open with.
// Throws InvalidArgument when `question` is empty.
std::string RubricPrompt(std::string_view question = kDefaultQuestion);

class ExtractionFailure : public Error {
 public:
  explicit ExtractionFailure(std::string scanned_text);
  const std::string& scanned_text() const { return scanned_text_; }

 private:
  std::string scanned_text_;
};

// Returns the first unsigned decimal numeral (digits with an optional
// fractional part) whose value lies in [1, 5]. Numerals out of range are
// skipped, as is any numeral directly preceded by "out of" so that
// "3 out of 5" yields 3 and never 5.
std::optional<Rating> FindRating(std::string_view assistant_text);

// Same as FindRating but throws ExtractionFailure when nothing qualifies.
Rating ExtractRating(std::string_view assistant_text);

}  // namespace equiview

#endif  // EQUIVIEW_RUBRIC_H_
