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

#include "equiview/cli.h"

#include <pthread.h>
#include <signal.h>

#include <atomic>
#include <csignal>
#include <ctime>
#include <fstream>
#include <iterator>
#include <thread>

#include "CLI11.hpp"
#include "equiview/bias.h"
#include "equiview/http_providers.h"
#include "equiview/http_server.h"
#include "equiview/mock_providers.h"
#include "equiview/rubric.h"
#include "equiview/sentiment.h"
#include "equiview/service.h"

namespace equiview {

namespace {

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8000;
  std::string session_dir = "sessions";
  std::string lexicon;
  std::string question{kDefaultQuestion};
  bool mock_providers = false;
  std::string mock_manifest;
  std::string mock_script;
  std::string mock_fallback_transcript;
};

struct AnalyzeOptions {
  std::string path;
  bool fixture = false;
  std::string format = "text";
};

struct SentimentOptions {
  std::string path;
  std::string lexicon;
  bool log = false;
};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("cannot read " + path);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

Lexicon LexiconFrom(const std::string& path) {
  return path.empty() ? DefaultLexicon() : LoadLexicon(path);
}

std::vector<std::string> DefaultMockScript() {
  return {
      "Welcome. To begin, please solve 49*54 and talk me through your steps.",
      "Thank you. How would you check that your answer is right?",
      "Final rating: 4",
  };
}

Providers MockProviders(const ServeOptions& opts) {
  auto transcriber = opts.mock_manifest.empty()
                         ? std::make_shared<ManifestTranscriber>()
                         : ManifestTranscriber::FromFile(opts.mock_manifest);
  if (!opts.mock_fallback_transcript.empty()) {
    transcriber->SetFallback(opts.mock_fallback_transcript);
  }
  std::vector<std::string> script = DefaultMockScript();
  if (!opts.mock_script.empty()) {
    const auto doc = nlohmann::json::parse(ReadFile(opts.mock_script), nullptr, false);
    if (!doc.is_array() || doc.empty()) {
      throw ParseError(opts.mock_script, opts.mock_script +
                                             ": mock script must be a non-empty "
                                             "JSON array of strings");
    }
    script.clear();
    for (const auto& line : doc) {
      if (!line.is_string() || line.get<std::string>().empty()) {
        throw ParseError(opts.mock_script,
                         opts.mock_script + ": every script entry must be a non-empty string");
      }
      script.push_back(line.get<std::string>());
    }
  }
  Providers p;
  p.transcriber = std::move(transcriber);
  p.responder = std::make_shared<ScriptedResponder>(std::move(script), /*cycle=*/true);
  p.synthesizer = std::make_shared<ToneSynthesizer>();
  return p;
}

int Serve(const ServeOptions& opts, std::ostream& out) {
  Providers providers =
      opts.mock_providers
          ? MockProviders(opts)
          : MakeHttpProviders(ConfigFromEnv(ProviderService::kStt),
                              ConfigFromEnv(ProviderService::kLlm),
                              ConfigFromEnv(ProviderService::kTts));
  ServiceConfig cfg;
  cfg.session_dir = opts.session_dir;
  cfg.seed_prompt = RubricPrompt(opts.question);
  cfg.lexicon = LexiconFrom(opts.lexicon);

  // Signals are collected by a watcher thread instead of an async handler.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auto service = std::make_shared<InterviewService>(std::move(cfg), std::move(providers));
  HttpFrontend frontend(service);
  const int port = frontend.Bind(opts.host, opts.port);
  out << "listening on http://" << opts.host << ":" << port
      << (opts.mock_providers ? " (mock providers)" : "") << std::endl;

  std::atomic<bool> done{false};
  std::thread watcher([&] {
    const timespec tick{0, 200'000'000};
    while (!done.load()) {
      if (sigtimedwait(&signals, nullptr, &tick) > 0) {
        frontend.Stop();
        return;
      }
    }
  });
  frontend.Run();
  done = true;
  watcher.join();
  return kExitOk;
}

int Analyze(const AnalyzeOptions& opts, std::ostream& out) {
  const ReportFormat format = ParseReportFormat(opts.format);
  auto records = opts.fixture ? BundledDataset() : LoadDataset(opts.path);
  out << RenderReport(BuildReport(std::move(records)), format);
  return kExitOk;
}

int ScoreFile(const SentimentOptions& opts, std::ostream& out) {
  const Lexicon lexicon = LexiconFrom(opts.lexicon);
  PolarityReport report;
  if (opts.log) {
    report = AnalyzeLog(LoadLog(opts.path), lexicon);
  } else {
    report = AnalyzeText(ReadFile(opts.path), lexicon);
  }
  out << ReportToJson(report).dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Voice interview service and sentiment-bias analytics", "equiview"};
  app.require_subcommand(1, 1);

  ServeOptions serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the interview HTTP service");
  serve_cmd->add_option("--host", serve.host, "Address to bind")->capture_default_str();
  serve_cmd->add_option("--port", serve.port, "Port to bind (0 picks one)")
      ->check(CLI::Range(0, 65535))
      ->capture_default_str();
  serve_cmd->add_option("--session-dir", serve.session_dir,
                        "Directory holding one JSON log per session")
      ->capture_default_str();
  serve_cmd->add_option("--lexicon", serve.lexicon, "Polarity lexicon (TSV)");
  serve_cmd->add_option("--question", serve.question, "Opening interview question")
      ->capture_default_str();
  serve_cmd->add_flag("--mock-providers", serve.mock_providers,
                      "Use deterministic offline providers");
  serve_cmd->add_option("--mock-manifest", serve.mock_manifest,
                        "Checksum-to-transcript manifest for the mock transcriber");
  serve_cmd->add_option("--mock-script", serve.mock_script,
                        "JSON array of scripted assistant replies");
  serve_cmd->add_option("--mock-fallback-transcript", serve.mock_fallback_transcript,
                        "Transcript for uploads missing from the manifest");

  AnalyzeOptions analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Sentiment-bias report for a dataset");
  auto* path_opt = analyze_cmd->add_option("path", analyze.path, "Dataset CSV");
  auto* fixture_flag =
      analyze_cmd->add_flag("--fixture", analyze.fixture, "Use the bundled dataset");
  path_opt->excludes(fixture_flag);
  analyze_cmd->add_option("--format", analyze.format, "text, json or csv")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();

  SentimentOptions sentiment;
  auto* sentiment_cmd = app.add_subcommand("sentiment", "Polarity report for a file");
  sentiment_cmd->add_option("file", sentiment.path, "Text file, or a log with --log")
      ->required();
  sentiment_cmd->add_option("--lexicon", sentiment.lexicon, "Polarity lexicon (TSV)");
  sentiment_cmd->add_flag("--log", sentiment.log,
                          "Treat the file as a conversation log (candidate turns only)");

  auto* fixtures_cmd =
      app.add_subcommand("fixtures", "Print the bundled candidate dataset as CSV");

  try {
    app.parse(argc, argv);
    if (*analyze_cmd && !analyze.fixture && analyze.path.empty()) {
      throw CLI::RequiredError("a dataset path or --fixture");
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*serve_cmd) return Serve(serve, out);
    if (*analyze_cmd) return Analyze(analyze, out);
    if (*sentiment_cmd) return ScoreFile(sentiment, out);
    if (*fixtures_cmd) {
      out << BundledDatasetCsv();
      return kExitOk;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomainError;
  }
  return kExitUsage;
}

}  // namespace equiview
