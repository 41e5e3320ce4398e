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

#include "equiview/bias.h"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <set>

#include <fmt/core.h>

#include "embedded_data.h"

namespace equiview {

namespace {

constexpr std::array<std::string_view, 5> kColumns = {
    "candidate_id", "knowledge_level", "sentiment", "ai_rating", "human_rating"};

// Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF tolerated.
std::vector<std::vector<std::string>> ReadCsv(std::string_view text,
                                              std::string_view source) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_row = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
    const bool blank = row.size() == 1 && row[0].empty();
    if (!blank) rows.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started) {
          throw ParseError(fmt::format("line {}", line),
                           fmt::format("{}: line {}: stray quote", source, line));
        }
        quoted = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (quoted) {
    throw ParseError(fmt::format("line {}", line),
                     fmt::format("{}: unterminated quoted field", source));
  }
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

std::string_view TrimSpaces(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
  }
  return out;
}

std::string Where(std::string_view source, std::size_t row, std::string_view column) {
  return fmt::format("{}: row {}, column {}", source, row, column);
}

double ParseNumber(std::string_view text, std::string_view source,
                   std::size_t row, std::string_view column) {
  const std::string value(TrimSpaces(text));
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size() || errno == ERANGE ||
      !std::isfinite(v)) {
    throw ParseError(fmt::format("row {}, column {}", row, column),
                     Where(source, row, column) + ": not a number: '" + value + "'");
  }
  return v;
}

Rating ParseRatingCell(std::string_view text, std::string_view source,
                       std::size_t row, std::string_view column) {
  const double v = ParseNumber(text, source, row, column);
  if (!Rating::InRange(v)) {
    throw ValidationError(Where(source, row, column) +
                          fmt::format(": rating {} is outside [1, 5]", v));
  }
  return Rating(v);
}

// Filtered ratings of one group, in row order.
std::vector<const CandidateRecord*> Select(std::span<const CandidateRecord> records,
                                           Sentiment sentiment) {
  std::vector<const CandidateRecord*> out;
  for (const auto& r : records) {
    if (r.sentiment == sentiment) out.push_back(&r);
  }
  return out;
}

std::string GroupLabel(Rater rater, Sentiment sentiment) {
  return fmt::format("{}/{}", RaterName(rater), SentimentName(sentiment));
}

std::string CsvField(const std::string& value) {
  if (value.find_first_of(",\"\r\n") == std::string::npos) return value;
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"') quoted.push_back('"');
    quoted.push_back(c);
  }
  quoted.push_back('"');
  return quoted;
}

// Fixed-point formatting without a "-0.00" artifact.
std::string Fixed(double v, int precision) {
  std::string s = fmt::format("{:.{}f}", v, precision);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) {
    s.erase(0, 1);
  }
  return s;
}

std::string RenderText(const BiasReport& report) {
  std::string out;
  out += "Candidate interview ratings\n\n";
  out += fmt::format("{:<14}{:>10}  {:<10}{:>10}{:>14}\n", "", "Knowledge",
                     "Sentiment", "AI rating", "Human rating");
  for (const auto& r : report.records) {
    const std::string sentiment = r.sentiment == Sentiment::kPositive ? "Positive" : "Negative";
    out += fmt::format("{:<14}{:>10}  {:<10}{:>10}{:>14}\n", r.candidate_id,
                       r.knowledge_level, sentiment, Fixed(r.ai_rating.value(), 2),
                       Fixed(r.human_rating.value(), 2));
  }

  out += "\nGroup statistics (rating vs knowledge level)\n\n";
  out += fmt::format("  {:<16}{:>3}{:>8}{:>8}{:>11}\n", "group", "n", "mean",
                     "slope", "intercept");
  for (const auto& g : report.groups) {
    out += fmt::format("  {:<16}{:>3}{:>8}{:>8}{:>11}\n",
                       GroupLabel(g.rater, g.sentiment), g.count, Fixed(g.mean, 2),
                       g.fit ? Fixed(g.fit->slope, 2) : "n/a",
                       g.fit ? Fixed(g.fit->intercept, 2) : "n/a");
  }

  out += "\nHuman minus AI mean rating\n";
  out += fmt::format("  positive sentiment (d_pos): {}\n", Fixed(report.d_pos, 2));
  out += fmt::format("  negative sentiment (d_neg): {}\n", Fixed(report.d_neg, 2));

  out += fmt::format("\nTotal absolute bias |d_pos| + |d_neg|: {}\n",
                     Fixed(report.total_abs_bias, 2));
  if (report.TotalBiasMatchesPublished()) {
    out += fmt::format("  published total bias {}: consistent\n",
                       Fixed(report.published_total_bias, 2));
  } else {
    out += fmt::format(
        "  published total bias {}: INCONSISTENT with its components "
        "(|{}| + |{}| = {})\n",
        Fixed(report.published_total_bias, 2), Fixed(report.d_pos, 2),
        Fixed(report.d_neg, 2), Fixed(report.total_abs_bias, 2));
  }

  out += "\nSentiment gap |mean_pos - mean_neg|\n";
  out += fmt::format("  human: {}\n", Fixed(report.gap_human, 2));
  out += fmt::format("  ai:    {}\n", Fixed(report.gap_ai, 2));
  if (report.reduction_pct) {
    out += fmt::format("Bias reduction (gap_human - gap_ai) / gap_human: {}%\n",
                       Fixed(*report.reduction_pct, 1));
  } else {
    out += "Bias reduction (gap_human - gap_ai) / gap_human: undefined (human gap is 0)\n";
  }
  if (report.ReductionMatchesPublished()) {
    out += fmt::format("  published reduction {}%: reproduced\n",
                       Fixed(report.published_reduction_pct, 1));
  } else {
    out += fmt::format(
        "  published reduction {}%: NOT REPRODUCED from the rating table\n",
        Fixed(report.published_reduction_pct, 1));
  }

  out += "\nPlot series (knowledge_level, rating)\n";
  for (const auto& g : report.groups) {
    out += fmt::format("  {:<16}", GroupLabel(g.rater, g.sentiment));
    for (const auto& [x, y] : g.series) out += fmt::format(" ({}, {})", x, y);
    out += "\n";
  }
  return out;
}

std::string RenderCsv(const BiasReport& report) {
  std::string out =
      "candidate_id,knowledge_level,sentiment,ai_rating,human_rating,ai_fitted,"
      "human_fitted\n";
  auto fitted = [&](Rater rater, const CandidateRecord& r) -> std::string {
    const auto& fit = report.Group(rater, r.sentiment).fit;
    if (!fit) return "";
    return fmt::format("{:.6f}", fit->intercept + fit->slope * r.knowledge_level);
  };
  for (const auto& r : report.records) {
    out += fmt::format("{},{},{},{},{},{},{}\n", CsvField(r.candidate_id),
                       r.knowledge_level,
                       r.sentiment == Sentiment::kPositive ? "Positive" : "Negative",
                       r.ai_rating.value(), r.human_rating.value(),
                       fitted(Rater::kAi, r), fitted(Rater::kHuman, r));
  }
  return out;
}

}  // namespace

std::string_view SentimentName(Sentiment sentiment) {
  return sentiment == Sentiment::kPositive ? "positive" : "negative";
}

std::string_view RaterName(Rater rater) {
  return rater == Rater::kAi ? "ai" : "human";
}

std::vector<CandidateRecord> ParseDataset(std::string_view csv,
                                          std::string_view source) {
  const auto rows = ReadCsv(csv, source);
  if (rows.empty()) {
    throw ParseError("header", fmt::format("{}: empty dataset", source));
  }

  const auto& header = rows.front();
  std::array<std::size_t, kColumns.size()> index{};
  if (header.size() != kColumns.size()) {
    throw ParseError("header", fmt::format("{}: expected {} columns in header, got {}",
                                           source, kColumns.size(), header.size()));
  }
  for (std::size_t c = 0; c < kColumns.size(); ++c) {
    std::size_t found = header.size();
    for (std::size_t h = 0; h < header.size(); ++h) {
      if (TrimSpaces(header[h]) == kColumns[c]) found = h;
    }
    if (found == header.size()) {
      throw ParseError("header", fmt::format("{}: header lacks column '{}'",
                                             source, kColumns[c]));
    }
    index[c] = found;
  }
  if (rows.size() == 1) {
    throw ParseError("row 1", fmt::format("{}: dataset has no data rows", source));
  }

  std::vector<CandidateRecord> records;
  std::set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != kColumns.size()) {
      throw ParseError(fmt::format("row {}", r),
                       fmt::format("{}: row {}: expected {} fields, got {}", source,
                                   r, kColumns.size(), row.size()));
    }
    CandidateRecord rec;
    rec.candidate_id = std::string(TrimSpaces(row[index[0]]));
    if (rec.candidate_id.empty()) {
      throw ParseError(fmt::format("row {}, column candidate_id", r),
                       Where(source, r, "candidate_id") + ": empty id");
    }
    if (!seen.insert(rec.candidate_id).second) {
      throw ValidationError(Where(source, r, "candidate_id") + ": duplicate id '" +
                            rec.candidate_id + "'");
    }

    const double level = ParseNumber(row[index[1]], source, r, "knowledge_level");
    if (level != std::floor(level)) {
      throw ParseError(fmt::format("row {}, column knowledge_level", r),
                       Where(source, r, "knowledge_level") + ": not an integer");
    }
    if (level < 1 || level > 5) {
      throw ValidationError(Where(source, r, "knowledge_level") +
                            fmt::format(": level {} is outside 1..5", level));
    }
    rec.knowledge_level = static_cast<int>(level);

    const std::string sentiment = Lower(TrimSpaces(row[index[2]]));
    if (sentiment == "positive") {
      rec.sentiment = Sentiment::kPositive;
    } else if (sentiment == "negative") {
      rec.sentiment = Sentiment::kNegative;
    } else {
      throw ParseError(fmt::format("row {}, column sentiment", r),
                       Where(source, r, "sentiment") + ": expected Positive or Negative");
    }
    rec.ai_rating = ParseRatingCell(row[index[3]], source, r, "ai_rating");
    rec.human_rating = ParseRatingCell(row[index[4]], source, r, "human_rating");
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<CandidateRecord> LoadDataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("dataset not found: " + path.string());
  const std::string body((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  return ParseDataset(body, path.string());
}

std::string_view BundledDatasetCsv() { return internal::EmbeddedCandidatesCsv(); }

std::vector<CandidateRecord> BundledDataset() {
  return ParseDataset(BundledDatasetCsv(), "candidates.csv");
}

std::string DatasetToCsv(std::span<const CandidateRecord> records) {
  std::string out;
  for (std::size_t c = 0; c < kColumns.size(); ++c) {
    if (c) out += ",";
    out += kColumns[c];
  }
  out += "\n";
  for (const auto& r : records) {
    out += fmt::format("{},{},{},{},{}\n", CsvField(r.candidate_id),
                       r.knowledge_level,
                       r.sentiment == Sentiment::kPositive ? "Positive" : "Negative",
                       r.ai_rating.value(), r.human_rating.value());
  }
  return out;
}

double GroupMean(std::span<const CandidateRecord> records, Rater rater,
                 Sentiment sentiment) {
  const auto group = Select(records, sentiment);
  if (group.empty()) {
    throw EmptyGroupError("no " + std::string(SentimentName(sentiment)) +
                          "-sentiment records");
  }
  double sum = 0.0;
  for (const auto* r : group) sum += r->RatingBy(rater);
  return sum / static_cast<double>(group.size());
}

double RaterDifference(std::span<const CandidateRecord> records,
                       Sentiment sentiment) {
  return GroupMean(records, Rater::kHuman, sentiment) -
         GroupMean(records, Rater::kAi, sentiment);
}

double TotalAbsBias(std::span<const CandidateRecord> records) {
  return std::abs(RaterDifference(records, Sentiment::kPositive)) +
         std::abs(RaterDifference(records, Sentiment::kNegative));
}

double SentimentGap(std::span<const CandidateRecord> records, Rater rater) {
  return std::abs(GroupMean(records, rater, Sentiment::kPositive) -
                  GroupMean(records, rater, Sentiment::kNegative));
}

double ReductionPct(std::span<const CandidateRecord> records) {
  const double human = SentimentGap(records, Rater::kHuman);
  const double ai = SentimentGap(records, Rater::kAi);
  // Means of values on a 1..5 scale; anything below this is rounding noise.
  if (human < 1e-12) {
    throw UndefinedMetricError("bias reduction is undefined: human sentiment gap is 0");
  }
  return 100.0 * (human - ai) / human;
}

LinearFit FitSlope(std::span<const CandidateRecord> records, Rater rater,
                   Sentiment sentiment) {
  const auto group = Select(records, sentiment);
  if (group.empty()) {
    throw EmptyGroupError("no " + std::string(SentimentName(sentiment)) +
                          "-sentiment records");
  }
  const double n = static_cast<double>(group.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto* r : group) {
    mean_x += r->knowledge_level;
    mean_y += r->RatingBy(rater);
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto* r : group) {
    const double dx = r->knowledge_level - mean_x;
    sxx += dx * dx;
    sxy += dx * (r->RatingBy(rater) - mean_y);
  }
  // Knowledge levels are integers, so any spread gives sxx >= 1/n.
  if (sxx < 1e-9) {
    throw DegenerateFitError(GroupLabel(rater, sentiment) +
                             ": fewer than two distinct knowledge levels");
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  return fit;
}

const GroupStats& BiasReport::Group(Rater rater, Sentiment sentiment) const {
  const std::size_t i = (rater == Rater::kAi ? 0 : 2) +
                        (sentiment == Sentiment::kPositive ? 0 : 1);
  return groups[i];
}

bool BiasReport::TotalBiasMatchesPublished() const {
  return std::abs(total_abs_bias - published_total_bias) <= kPublishedTolerance;
}

bool BiasReport::ReductionMatchesPublished() const {
  // The published percentage carries one decimal.
  return reduction_pct && std::abs(*reduction_pct - published_reduction_pct) <= 0.05;
}

BiasReport BuildReport(std::vector<CandidateRecord> records) {
  BiasReport report;
  report.records = std::move(records);
  const std::span<const CandidateRecord> rs = report.records;

  std::size_t i = 0;
  for (Rater rater : {Rater::kAi, Rater::kHuman}) {
    for (Sentiment sentiment : {Sentiment::kPositive, Sentiment::kNegative}) {
      GroupStats& g = report.groups[i++];
      g.rater = rater;
      g.sentiment = sentiment;
      g.mean = GroupMean(rs, rater, sentiment);
      for (const auto& r : rs) {
        if (r.sentiment != sentiment) continue;
        ++g.count;
        g.series.emplace_back(r.knowledge_level, r.RatingBy(rater));
      }
      try {
        g.fit = FitSlope(rs, rater, sentiment);
      } catch (const DegenerateFitError&) {
        g.fit.reset();
      }
    }
  }
  report.d_pos = RaterDifference(rs, Sentiment::kPositive);
  report.d_neg = RaterDifference(rs, Sentiment::kNegative);
  report.total_abs_bias = std::abs(report.d_pos) + std::abs(report.d_neg);
  report.gap_human = SentimentGap(rs, Rater::kHuman);
  report.gap_ai = SentimentGap(rs, Rater::kAi);
  try {
    report.reduction_pct = ReductionPct(rs);
  } catch (const UndefinedMetricError&) {
    report.reduction_pct.reset();
  }
  return report;
}

ReportFormat ParseReportFormat(std::string_view name) {
  if (name == "text") return ReportFormat::kText;
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  throw InvalidArgument("unknown report format '" + std::string(name) +
                        "' (expected text, json or csv)");
}

nlohmann::json ReportToJson(const BiasReport& report) {
  using nlohmann::json;
  json records = json::array();
  for (const auto& r : report.records) {
    records.push_back({{"candidate_id", r.candidate_id},
                       {"knowledge_level", r.knowledge_level},
                       {"sentiment", SentimentName(r.sentiment)},
                       {"ai_rating", r.ai_rating.value()},
                       {"human_rating", r.human_rating.value()}});
  }
  json groups = json::array();
  for (const auto& g : report.groups) {
    json series = json::array();
    for (const auto& [x, y] : g.series) series.push_back(json::array({x, y}));
    groups.push_back({{"rater", RaterName(g.rater)},
                      {"sentiment", SentimentName(g.sentiment)},
                      {"n", g.count},
                      {"mean", g.mean},
                      {"slope", g.fit ? json(g.fit->slope) : json(nullptr)},
                      {"intercept", g.fit ? json(g.fit->intercept) : json(nullptr)},
                      {"series", std::move(series)}});
  }
  return json{
      {"schema", "bias-report/1"},
      {"records", std::move(records)},
      {"groups", std::move(groups)},
      {"rater_difference", {{"positive", report.d_pos}, {"negative", report.d_neg}}},
      {"total_abs_bias", report.total_abs_bias},
      {"published_total_bias", report.published_total_bias},
      {"total_bias_consistent", report.TotalBiasMatchesPublished()},
      {"sentiment_gap", {{"human", report.gap_human}, {"ai", report.gap_ai}}},
      {"reduction_pct", report.reduction_pct ? json(*report.reduction_pct) : json(nullptr)},
      {"published_reduction_pct", report.published_reduction_pct},
      {"reduction_reproduced", report.ReductionMatchesPublished()},
  };
}

std::string RenderReport(const BiasReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::kText:
      return RenderText(report);
    case ReportFormat::kJson:
      return ReportToJson(report).dump(2) + "\n";
    case ReportFormat::kCsv:
      return RenderCsv(report);
  }
  throw InvalidArgument("unknown report format");
}

}  // namespace equiview
