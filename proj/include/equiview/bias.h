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

// Sentiment-bias statistics over rated candidate interviews.
//
// Every candidate is rated twice (AI and human) and carries one sentiment
// label. Differences are always human minus AI, so a positive value means
// humans rated the group higher.
//
// Dataset CSV header: candidate_id,knowledge_level,sentiment,ai_rating,human_rating

#ifndef EQUIVIEW_BIAS_H_
#define EQUIVIEW_BIAS_H_

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "equiview/error.h"
#include "equiview/rubric.h"
#include "json.hpp"

namespace equiview {

enum class Sentiment { kPositive, kNegative };
enum class Rater { kAi, kHuman };

std::string_view SentimentName(Sentiment sentiment);  // "positive"/"negative"
std::string_view RaterName(Rater rater);              // "ai"/"human"

struct CandidateRecord {
  std::string candidate_id;
  int knowledge_level = 1;
  Sentiment sentiment = Sentiment::kPositive;
  Rating ai_rating{Rating::kMin};
  Rating human_rating{Rating::kMin};

  double RatingBy(Rater rater) const {
    return (rater == Rater::kAi ? ai_rating : human_rating).value();
  }
  bool operator==(const CandidateRecord&) const = default;
};

class EmptyGroupError : public Error {
 public:
  using Error::Error;
};

class DegenerateFitError : public Error {
 public:
  using Error::Error;
};

class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

// Throws ParseError ("row N, column C") for schema violations, including an
// empty document, and ValidationError for out-of-range values.
std::vector<CandidateRecord> ParseDataset(std::string_view csv,
                                          std::string_view source = "<csv>");
std::vector<CandidateRecord> LoadDataset(const std::filesystem::path& path);

// The ten rated interviews shipped as data/candidates.csv.
std::string_view BundledDatasetCsv();
std::vector<CandidateRecord> BundledDataset();

std::string DatasetToCsv(std::span<const CandidateRecord> records);

double GroupMean(std::span<const CandidateRecord> records, Rater rater,
                 Sentiment sentiment);
// Human mean minus AI mean within one sentiment group.
double RaterDifference(std::span<const CandidateRecord> records,
                       Sentiment sentiment);
// |d_pos| + |d_neg|.
double TotalAbsBias(std::span<const CandidateRecord> records);
// |mean_positive - mean_negative| for one rater.
double SentimentGap(std::span<const CandidateRecord> records, Rater rater);
// 100 * (gap_human - gap_ai) / gap_human. Throws UndefinedMetricError when
// the human gap is zero.
double ReductionPct(std::span<const CandidateRecord> records);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Ordinary least squares of rating on knowledge level within one group.
// Throws EmptyGroupError or DegenerateFitError (fewer than two distinct
// knowledge levels).
LinearFit FitSlope(std::span<const CandidateRecord> records, Rater rater,
                   Sentiment sentiment);

// Published figures the computed metrics are compared against.
inline constexpr double kPublishedTotalBias = 2.06;
inline constexpr double kPublishedReductionPct = 41.2;
// Two-decimal agreement, the precision the published figures carry.
inline constexpr double kPublishedTolerance = 0.005;

struct GroupStats {
  Rater rater;
  Sentiment sentiment;
  std::size_t count = 0;
  double mean = 0.0;
  std::optional<LinearFit> fit;  // empty when the group has a single level
  std::vector<std::pair<int, double>> series;  // (knowledge_level, rating)
};

struct BiasReport {
  std::vector<CandidateRecord> records;
  // Ordered ai/positive, ai/negative, human/positive, human/negative.
  std::array<GroupStats, 4> groups;
  double d_pos = 0.0;
  double d_neg = 0.0;
  double total_abs_bias = 0.0;
  double published_total_bias = kPublishedTotalBias;
  double gap_human = 0.0;
  double gap_ai = 0.0;
  std::optional<double> reduction_pct;
  double published_reduction_pct = kPublishedReductionPct;

  const GroupStats& Group(Rater rater, Sentiment sentiment) const;
  bool TotalBiasMatchesPublished() const;
  bool ReductionMatchesPublished() const;
};

// Throws EmptyGroupError when any rater/sentiment group is empty.
BiasReport BuildReport(std::vector<CandidateRecord> records);

enum class ReportFormat { kText, kJson, kCsv };
// Throws InvalidArgument for anything but "text", "json", "csv".
ReportFormat ParseReportFormat(std::string_view name);

// JSON document with "schema": "bias-report/1".
nlohmann::json ReportToJson(const BiasReport& report);

// Deterministic: identical reports render to identical bytes.
std::string RenderReport(const BiasReport& report, ReportFormat format);

}  // namespace equiview

#endif  // EQUIVIEW_BIAS_H_
