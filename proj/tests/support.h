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


// Shared helpers and reference implementations for the test binaries.
// The oracles here deliberately avoid the library's own code paths.

#ifndef EQUIVIEW_TESTS_SUPPORT_H_
#define EQUIVIEW_TESTS_SUPPORT_H_

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "equiview/bias.h"
#include "equiview/sentiment.h"

namespace equiview::testing {

inline std::filesystem::path FixturePath(const std::string& relative) {
  return std::filesystem::path(EQUIVIEW_TEST_FIXTURES) / relative;
}

inline std::string ReadBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

inline void WriteBytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("equiview-test-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ignored;
    std::filesystem::permissions(path_, std::filesystem::perms::owner_all,
                                 std::filesystem::perm_options::add, ignored);
    std::filesystem::remove_all(path_, ignored);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::size_t CountFiles(const std::filesystem::path& dir) {
  if (!std::filesystem::exists(dir)) return 0;
  return static_cast<std::size_t>(std::distance(
      std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator()));
}

// ---------------------------------------------------------------------------
// Sentiment oracle.
//
// A random case is built from explicit sentences of words, so the expected
// score follows from the construction itself. A second, naive re-scan
// recovers the same value from the rendered text alone.

struct SentimentCase {
  std::map<std::string, double, std::less<>> entries;
  std::set<std::string, std::less<>> negators;
  std::string text;
  double expected_score = 0.0;
  std::size_t expected_matches = 0;
};

inline std::string RandomToken(std::mt19937_64& rng, const std::string& first_chars) {
  static const std::string kAlnum = "abcdefghijklmnopqrstuvwxyz0123456789";
  std::uniform_int_distribution<int> len(1, 6);
  std::string token(1, first_chars[rng() % first_chars.size()]);
  const int n = len(rng);
  for (int i = 1; i < n; ++i) token.push_back(kAlnum[rng() % kAlnum.size()]);
  // Sometimes a contraction-style token.
  if (rng() % 6 == 0) {
    token += "'";
    token.push_back("tsdlmv"[rng() % 6]);
  }
  return token;
}

inline std::string RandomCase(std::mt19937_64& rng, const std::string& word) {
  std::string out = word;
  switch (rng() % 3) {
    case 0:
      break;
    case 1:
      for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      break;
    default:
      out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  }
  return out;
}

inline SentimentCase MakeSentimentCase(std::mt19937_64& rng) {
  SentimentCase c;
  std::uniform_real_distribution<double> polarity(-1.0, 1.0);
  // Lexicon words start with a-m, negators with n-r, fillers with s-z, so the
  // three vocabularies never overlap.
  const int n_entries = 1 + static_cast<int>(rng() % 12);
  while (static_cast<int>(c.entries.size()) < n_entries) {
    double p = polarity(rng);
    if (rng() % 10 == 0) p = (rng() % 2) ? 1.0 : -1.0;
    c.entries.emplace(RandomToken(rng, "abcdefghijklm"), p);
  }
  const int n_negators = static_cast<int>(rng() % 4);
  while (static_cast<int>(c.negators.size()) < n_negators) {
    c.negators.insert(RandomToken(rng, "nopqr"));
  }
  std::vector<std::string> fillers;
  for (int i = 0; i < 6; ++i) fillers.push_back(RandomToken(rng, "stuvwxyz"));

  std::vector<std::string> entry_words;
  for (const auto& [token, p] : c.entries) entry_words.push_back(token);
  std::vector<std::string> negator_words(c.negators.begin(), c.negators.end());

  static const std::vector<std::string> kGaps = {" ", ", ", " - ", " (", ") ", "/",
                                                 "  ", "\t", " \"", ": ", " & "};
  static const std::vector<std::string> kEnds = {". ", "! ", "? ", "; ", "\n",
                                                 "... ", "?! "};

  double sum = 0.0;
  const int sentences = static_cast<int>(rng() % 7);
  for (int s = 0; s < sentences; ++s) {
    bool negate = false;
    const int words = static_cast<int>(rng() % 9);
    for (int w = 0; w < words; ++w) {
      const auto pick = rng() % 10;
      std::string word;
      if (pick < 4 || negator_words.empty()) {
        if (pick < 2) {
          word = fillers[rng() % fillers.size()];
        } else {
          word = entry_words[rng() % entry_words.size()];
          const double p = c.entries.at(word);
          sum += negate ? -p : p;
          ++c.expected_matches;
          negate = false;
        }
      } else if (pick < 7) {
        word = entry_words[rng() % entry_words.size()];
        const double p = c.entries.at(word);
        sum += negate ? -p : p;
        ++c.expected_matches;
        negate = false;
      } else {
        word = negator_words[rng() % negator_words.size()];
        negate = !negate;
      }
      if (w > 0) c.text += kGaps[rng() % kGaps.size()];
      c.text += RandomCase(rng, word);
    }
    c.text += kEnds[rng() % kEnds.size()];
  }
  c.expected_score =
      c.expected_matches == 0 ? 0.0 : sum / static_cast<double>(c.expected_matches);
  return c;
}

// Naive re-scan over ASCII text: split into sentences at terminators, then
// pull maximal [a-z0-9']+ runs and trim stray apostrophes.
inline double RescanScore(const std::string& text,
                          const std::map<std::string, double, std::less<>>& entries,
                          const std::set<std::string, std::less<>>& negators,
                          std::size_t* matches_out = nullptr) {
  std::string lower;
  for (char ch : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));

  std::vector<std::string> sentences(1);
  for (char ch : lower) {
    if (ch == '.' || ch == '!' || ch == '?' || ch == ';' || ch == '\n') {
      sentences.emplace_back();
    } else {
      sentences.back().push_back(ch);
    }
  }
  double sum = 0.0;
  std::size_t matches = 0;
  for (const std::string& sentence : sentences) {
    std::vector<std::string> words;
    std::string cur;
    auto flush = [&] {
      while (!cur.empty() && cur.front() == '\'') cur.erase(cur.begin());
      while (!cur.empty() && cur.back() == '\'') cur.pop_back();
      if (!cur.empty()) words.push_back(cur);
      cur.clear();
    };
    for (char ch : sentence) {
      if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '\'') {
        cur.push_back(ch);
      } else {
        flush();
      }
    }
    flush();
    bool negate = false;
    for (const std::string& w : words) {
      if (negators.count(w)) {
        negate = !negate;
      } else if (auto it = entries.find(w); it != entries.end()) {
        sum += negate ? -it->second : it->second;
        ++matches;
        negate = false;
      }
    }
  }
  if (matches_out) *matches_out = matches;
  return matches == 0 ? 0.0 : sum / static_cast<double>(matches);
}

// ---------------------------------------------------------------------------
// Rating oracle inputs: texts of the form "<prefix> R <suffix>".

inline std::string DigitFreeFragment(std::mt19937_64& rng) {
  static const std::vector<std::string> kWords = {
      "I",        "would",  "rate", "the",      "candidate", "a",       "solid",
      "Rating:",  "score",  "is",   "overall,", "about",     "roughly", "final",
      "answer",   "(",      ")",    "-",        "\"",        "points",  "level",
      "on",       "scale",  "my",   "verdict",  "=",         "~",       "they",
      "earn",     "grade",  "Out",  "Of",       "outof",     "of",      "out",
      "strong",   "weak",   "tier", "maybe",    ":",         "!",       "?"};
  std::string out;
  const int n = static_cast<int>(rng() % 8);
  for (int i = 0; i < n; ++i) {
    if (i > 0) out += ' ';
    out += kWords[rng() % kWords.size()];
  }
  return out;
}

// A prefix must not end in "out of": the extraction contract skips that numeral.
inline bool EndsWithOutOf(const std::string& prefix) {
  std::string lower;
  for (char ch : prefix) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  while (!lower.empty() && lower.back() == ' ') lower.pop_back();
  if (lower.size() < 6 || lower.compare(lower.size() - 6, 6, "out of") != 0) return false;
  return lower.size() == 6 || !std::isalnum(static_cast<unsigned char>(lower[lower.size() - 7]));
}

struct RatingCase {
  std::string text;
  double expected = 0.0;
};

inline RatingCase MakeRatingCase(std::mt19937_64& rng, bool with_out_of) {
  std::string prefix;
  do {
    prefix = DigitFreeFragment(rng);
  } while (EndsWithOutOf(prefix));
  const int decimals = static_cast<int>(rng() % 3);
  std::uniform_real_distribution<double> u(1.0, 5.0);
  const double scale = std::pow(10.0, decimals);
  const double r = std::clamp(std::round(u(rng) * scale) / scale, 1.0, 5.0);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, r);

  std::string suffix = DigitFreeFragment(rng);
  if (with_out_of) {
    suffix = (rng() % 2 ? "out of 5" : "OUT OF  5") + std::string(rng() % 2 ? "." : " ") + suffix;
  }
  RatingCase c;
  c.text = prefix + " " + buf + " " + suffix;
  c.expected = std::strtod(buf, nullptr);
  return c;
}

// ---------------------------------------------------------------------------
// Bias oracles.

// Plain fold in long double over the rows matching (rater, sentiment).
inline double FoldMean(const std::vector<CandidateRecord>& rows, Rater rater,
                       Sentiment sentiment) {
  long double sum = 0.0L;
  long double n = 0.0L;
  for (const auto& r : rows) {
    if (r.sentiment != sentiment) continue;
    sum += rater == Rater::kAi ? r.ai_rating.value() : r.human_rating.value();
    n += 1.0L;
  }
  return static_cast<double>(sum / n);
}

struct GridFit {
  double slope;
  double intercept;
};

// Coarse-to-fine grid search minimizing the squared error of y = a*x + b.
inline GridFit GridMinimize(const std::vector<std::pair<double, double>>& points) {
  auto sse = [&](double a, double b) {
    long double s = 0.0L;
    for (const auto& [x, y] : points) {
      const long double e = static_cast<long double>(y) - (a * x + b);
      s += e * e;
    }
    return s;
  };
  double ca = 0.0, cb = 0.0, half = 16.0;
  constexpr int kSteps = 100;
  while (half > 1e-10) {
    const double step = half / kSteps;
    double best_a = ca, best_b = cb;
    long double best = std::numeric_limits<long double>::infinity();
    for (int i = -kSteps; i <= kSteps; ++i) {
      for (int j = -kSteps; j <= kSteps; ++j) {
        const double a = ca + i * step;
        const double b = cb + j * step;
        const long double e = sse(a, b);
        if (e < best) {
          best = e;
          best_a = a;
          best_b = b;
        }
      }
    }
    ca = best_a;
    cb = best_b;
    half = 2.0 * step;
  }
  return {ca, cb};
}

inline std::vector<std::pair<double, double>> GroupPoints(
    const std::vector<CandidateRecord>& rows, Rater rater, Sentiment sentiment) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) {
    if (r.sentiment != sentiment) continue;
    pts.emplace_back(r.knowledge_level,
                     rater == Rater::kAi ? r.ai_rating.value() : r.human_rating.value());
  }
  return pts;
}

}  // namespace equiview::testing

#endif  // EQUIVIEW_TESTS_SUPPORT_H_
