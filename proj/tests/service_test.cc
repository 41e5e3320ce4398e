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


#include <condition_variable>
#include <future>

#include "doctest.h"
#include "equiview/http_server.h"
#include "equiview/mock_providers.h"
#include "equiview/service.h"
#include "http_support.h"
#include "json.hpp"
#include "support.h"

namespace equiview {
namespace {

using nlohmann::json;
using testing::ReadBytes;
using testing::TempDir;

const std::string& AnswerClip() {
  static const std::string bytes =
      ReadBytes(testing::FixturePath("audio/answer_49x54.wav"));
  return bytes;
}

const std::string& PositiveClip() {
  static const std::string bytes =
      ReadBytes(testing::FixturePath("audio/positive_answer.wav"));
  return bytes;
}

const std::string& UnmappedClip() {
  static const std::string bytes = ReadBytes(testing::FixturePath("audio/unmapped.wav"));
  return bytes;
}

struct Mocks {
  std::shared_ptr<ManifestTranscriber> stt =
      ManifestTranscriber::FromFile(testing::FixturePath("audio/manifest.json"));
  std::shared_ptr<ScriptedResponder> llm;
  std::shared_ptr<ToneSynthesizer> tts = std::make_shared<ToneSynthesizer>();

  explicit Mocks(std::vector<std::string> script = {"How did you get 2646?",
                                                    "Final rating: 4"})
      : llm(std::make_shared<ScriptedResponder>(std::move(script), true)) {}

  Providers providers() const { return {stt, llm, tts}; }
};

std::shared_ptr<InterviewService> MakeService(const TempDir& dir, const Mocks& mocks,
                                              Providers override_providers = {}) {
  ServiceConfig cfg;
  cfg.session_dir = dir / "sessions";
  Providers p = mocks.providers();
  if (override_providers.transcriber) p.transcriber = override_providers.transcriber;
  return std::make_shared<InterviewService>(std::move(cfg), std::move(p));
}

// Transcriber that parks inside Transcribe until released.
class GateTranscriber : public Transcriber {
 public:
  std::string Transcribe(const AudioBlob&) override {
    std::unique_lock lock(mu_);
    entered_ = true;
    cv_.notify_all();
    cv_.wait(lock, [&] { return released_; });
    return "slow answer";
  }
  void WaitEntered() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return entered_; });
  }
  void Release() {
    std::lock_guard lock(mu_);
    released_ = true;
    cv_.notify_all();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  bool entered_ = false;
  bool released_ = false;
};

TEST_SUITE("service") {
  TEST_CASE("talk runs the pipeline and persists") {
    TempDir dir;
    Mocks mocks;
    auto service = MakeService(dir, mocks);
    CHECK(service->HandleHistory("default").turn_count() == 1);

    TalkResult r = service->HandleTalk("default", AudioBlob(AnswerClip(), MediaType::kWav));
    CHECK(r.transcript == "forty nine times fifty four");
    CHECK(r.reply == "How did you get 2646?");
    CHECK_FALSE(r.rating.has_value());
    const std::string audio = DrainStream(*r.audio);
    CHECK(audio == ToneSynthesizer::Render(r.reply));

    const ConversationLog log = service->HandleHistory("default");
    REQUIRE(log.turn_count() == 3);
    CHECK(log.turns()[0].role == Role::kSystem);
    CHECK(log.turns()[1].role == Role::kCandidate);
    CHECK(log.turns()[1].text == r.transcript);
    CHECK(log.turns()[2].role == Role::kAssistant);
    CHECK(LoadLog(service->SessionPath("default")) == log);

    // The responder saw the new candidate turn.
    const auto req = mocks.llm->requests().back();
    CHECK(req["messages"].size() == 2);
    CHECK(req["messages"][1]["content"] == r.transcript);
  }

  TEST_CASE("rating is captured from replies and reset by clear") {
    TempDir dir;
    Mocks mocks;
    auto service = MakeService(dir, mocks);
    CHECK_FALSE(service->HandleRating("default").has_value());
    service->HandleTalk("default", AudioBlob(AnswerClip(), MediaType::kWav));
    CHECK_FALSE(service->HandleRating("default").has_value());
    const TalkResult r = service->HandleTalk("default", AudioBlob(AnswerClip(), MediaType::kWav));
    REQUIRE(r.rating.has_value());
    CHECK(r.rating->value() == 4.0);
    CHECK(service->HandleRating("default")->value() == 4.0);
    CHECK(service->HandleHistory("default").turn_count() == 5);

    service->HandleClear("default");
    CHECK(service->HandleHistory("default").turn_count() == 1);
    CHECK_FALSE(service->HandleRating("default").has_value());
    const std::string once = ReadBytes(service->SessionPath("default"));
    service->HandleClear("default");
    CHECK(ReadBytes(service->SessionPath("default")) == once);
    CHECK(service->HandleHistory("default").turns()[0].text == service->config().seed_prompt);
  }

  TEST_CASE("failure at each stage leaves the session untouched") {
    TempDir dir;
    Mocks mocks;
    auto service = MakeService(dir, mocks);
    service->HandleTalk("default", AudioBlob(AnswerClip(), MediaType::kWav));
    const std::string file_before = ReadBytes(service->SessionPath("default"));
    const ConversationLog log_before = service->HandleHistory("default");
    const auto epoch_before = service->Epoch("default");

    auto expect_stage = [&](Stage stage) {
      try {
        service->HandleTalk("default", AudioBlob(AnswerClip(), MediaType::kWav));
        FAIL("expected ProviderError");
      } catch (const ProviderError& e) {
        CHECK(e.stage() == stage);
      }
      CHECK(ReadBytes(service->SessionPath("default")) == file_before);
      CHECK(service->HandleHistory("default") == log_before);
      CHECK(service->Epoch("default") == epoch_before);
      CHECK(testing::CountFiles(service->config().temp_dir) == 0);
    };
    mocks.stt->FailNext(ProviderErrorKind::kUnavailable);
    expect_stage(Stage::kTranscribe);
    mocks.llm->FailNext(ProviderErrorKind::kTimeout);
    expect_stage(Stage::kRespond);
    mocks.tts->FailNext(ProviderErrorKind::kUnavailable);
    expect_stage(Stage::kSynthesize);

    // Unmapped audio: empty transcript.
    CHECK_THROWS_AS(service->HandleTalk("default", AudioBlob(UnmappedClip(), MediaType::kWav)),
                    ProviderError);
    CHECK(service->HandleHistory("default") == log_before);
  }

  TEST_CASE("storage failure leaves the published log unchanged") {
    TempDir dir;
    Mocks mocks;
    auto service = MakeService(dir, mocks);
    const ConversationLog before = service->HandleHistory("default");
    const auto path = service->SessionPath("default");
    std::filesystem::remove(path);
    std::filesystem::create_directories(path / "blocker");
    CHECK_THROWS_AS(service->HandleTalk("default", AudioBlob(AnswerClip(), MediaType::kWav)),
                    StorageError);
    CHECK(service->HandleHistory("default") == before);
    CHECK(testing::CountFiles(service->config().temp_dir) == 0);
  }

  TEST_CASE("sessions are isolated and reload from disk") {
    TempDir dir;
    Mocks mocks;
    {
      auto service = MakeService(dir, mocks);
      service->HandleTalk("alpha", AudioBlob(AnswerClip(), MediaType::kWav));
      service->HandleTalk("alpha", AudioBlob(AnswerClip(), MediaType::kWav));
      CHECK(service->HandleHistory("alpha").turn_count() == 5);
      CHECK(service->HandleHistory("default").turn_count() == 1);
      CHECK_THROWS_AS(service->HandleHistory("beta"), SessionNotFound);
      CHECK_THROWS_AS(service->HandleTalk("../etc", AudioBlob(AnswerClip(), MediaType::kWav)),
                      InvalidArgument);
    }
    auto reloaded = MakeService(dir, mocks);
    CHECK(reloaded->HandleHistory("alpha").turn_count() == 5);
    CHECK(reloaded->HandleRating("alpha")->value() == 4.0);
    const auto ids = reloaded->SessionIds();
    CHECK(ids == std::vector<std::string>{"alpha", "default"});
  }

  TEST_CASE("analyze reads candidate turns") {
    TempDir dir;
    Mocks mocks({"Thanks."});
    auto service = MakeService(dir, mocks);
    const PolarityReport fresh = service->HandleAnalyze("default");
    CHECK(fresh.score == 0.0);
    CHECK(fresh.label == Polarity::kNeutral);
    service->HandleTalk("default", AudioBlob(PositiveClip(), MediaType::kWav));
    const PolarityReport r = service->HandleAnalyze("default");
    CHECK(r.score == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.label == Polarity::kPositive);
    CHECK(r.turns_analyzed == 1);
    CHECK_THROWS_AS(service->HandleAnalyze("nobody"), SessionNotFound);
    CHECK_THROWS_AS(service->HandleClear("nobody"), SessionNotFound);
    CHECK_THROWS_AS(service->HandleRating("nobody"), SessionNotFound);
  }

  TEST_CASE("concurrent talk on one session is refused") {
    TempDir dir;
    Mocks mocks;
    auto gate = std::make_shared<GateTranscriber>();
    auto service = MakeService(dir, mocks, Providers{gate, nullptr, nullptr});
    auto first = std::async(std::launch::async, [&] {
      return service->HandleTalk("default", AudioBlob(AnswerClip(), MediaType::kWav)).transcript;
    });
    gate->WaitEntered();
    CHECK_THROWS_AS(service->HandleTalk("default", AudioBlob(AnswerClip(), MediaType::kWav)),
                    SessionBusy);
    gate->Release();
    CHECK(first.get() == "slow answer");
    CHECK(service->HandleHistory("default").turn_count() == 3);
  }

  TEST_CASE("session ids") {
    CHECK(IsValidSessionId("default"));
    CHECK(IsValidSessionId("a-b_C9"));
    CHECK_FALSE(IsValidSessionId(""));
    CHECK_FALSE(IsValidSessionId("a/b"));
    CHECK_FALSE(IsValidSessionId(".."));
    CHECK_FALSE(IsValidSessionId(std::string(65, 'a')));
  }
}

TEST_SUITE("http") {
  json History(httplib::Client& cli, const std::string& session = "") {
    auto res = cli.Get("/history", testing::SessionHeader(session));
    REQUIRE(res);
    REQUIRE(res->status == 200);
    return json::parse(res->body);
  }

  TEST_CASE("talk round trip over http") {
    TempDir dir;
    Mocks mocks;
    auto service = MakeService(dir, mocks);
    testing::RunningFrontend server(service);
    auto cli = server.Client();

    CHECK(History(cli)["turns"].size() == 1);
    auto res = testing::PostAudio(cli, AnswerClip());
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->get_header_value("Content-Type") == "audio/wav");
    CHECK(res->get_header_value("X-Session") == "default");
    CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");
    CHECK_FALSE(res->body.empty());
    CHECK(res->body == ToneSynthesizer::Render("How did you get 2646?"));

    const json history = History(cli);
    REQUIRE(history["turns"].size() == 3);
    CHECK(history["turns"][0]["role"] == "system");
    CHECK(history["turns"][1]["role"] == "candidate");
    CHECK(history["turns"][1]["text"] == "forty nine times fifty four");
    CHECK(history["turns"][2]["role"] == "assistant");
    CHECK(testing::CountFiles(service->config().temp_dir) == 0);
  }

  TEST_CASE("error statuses keep history byte-identical") {
    TempDir dir;
    Mocks mocks;
    auto service = MakeService(dir, mocks);
    testing::RunningFrontend server(service);
    auto cli = server.Client();
    REQUIRE(testing::PostAudio(cli, AnswerClip())->status == 200);
    const std::string before = cli.Get("/history")->body;
    const std::string file_before = ReadBytes(service->SessionPath("default"));

    auto expect = [&](int status, const std::string& stage, httplib::Result res) {
      REQUIRE(res);
      CHECK(res->status == status);
      const json body = json::parse(res->body);
      CHECK(body.contains("error"));
      if (!stage.empty()) CHECK(body["stage"] == stage);
      CHECK(cli.Get("/history")->body == before);
      CHECK(ReadBytes(service->SessionPath("default")) == file_before);
      CHECK(testing::CountFiles(service->config().temp_dir) == 0);
    };

    expect(415, "", testing::PostAudio(cli, "hello", "text/plain"));
    expect(422, "transcribe", testing::PostAudio(cli, UnmappedClip()));
    mocks.stt->FailNext(ProviderErrorKind::kUnavailable);
    expect(502, "transcribe", testing::PostAudio(cli, AnswerClip()));
    mocks.llm->FailNext(ProviderErrorKind::kTimeout);
    expect(502, "respond", testing::PostAudio(cli, AnswerClip()));
    mocks.tts->FailNext(ProviderErrorKind::kUnavailable);
    expect(502, "synthesize", testing::PostAudio(cli, AnswerClip()));
    mocks.stt->FailNext(ProviderErrorKind::kUnsupportedMedia);
    expect(415, "transcribe", testing::PostAudio(cli, AnswerClip()));
    expect(400, "", testing::PostAudio(cli, "", "audio/wav"));
    expect(400, "", cli.Post("/talk", "raw", "audio/wav"));
    httplib::MultipartFormDataItems wrong_field = {{"audio", AnswerClip(), "a.wav", "audio/wav"}};
    expect(400, "", cli.Post("/talk", wrong_field));
  }

  TEST_CASE("read endpoints do not mutate state") {
    TempDir dir;
    Mocks mocks;
    auto service = MakeService(dir, mocks);
    testing::RunningFrontend server(service);
    auto cli = server.Client();
    REQUIRE(testing::PostAudio(cli, PositiveClip())->status == 200);
    const std::string file_before = ReadBytes(service->SessionPath("default"));
    const auto epoch = service->Epoch("default");
    const std::string history = cli.Get("/history")->body;
    const std::string analyze = cli.Get("/analyze")->body;
    for (int i = 0; i < 3; ++i) {
      CHECK(cli.Get("/history")->body == history);
      CHECK(cli.Get("/analyze")->body == analyze);
      CHECK(cli.Get("/rating")->status == 200);
    }
    CHECK(ReadBytes(service->SessionPath("default")) == file_before);
    CHECK(service->Epoch("default") == epoch);

    const json report = json::parse(analyze);
    CHECK(report["label"] == "positive");
    CHECK(report["score"].get<double>() == doctest::Approx(0.5));
  }

  TEST_CASE("clear, rating and unknown sessions") {
    TempDir dir;
    Mocks mocks;
    auto service = MakeService(dir, mocks);
    testing::RunningFrontend server(service);
    auto cli = server.Client();

    auto rating = [&](const std::string& session = "") {
      auto res = cli.Get("/rating", testing::SessionHeader(session));
      REQUIRE(res);
      return std::make_pair(res->status, res->status == 200 ? json::parse(res->body) : json());
    };
    CHECK(rating().second == json{{"ready", false}, {"rating", nullptr}});
    REQUIRE(testing::PostAudio(cli, AnswerClip())->status == 200);
    REQUIRE(testing::PostAudio(cli, AnswerClip())->status == 200);
    CHECK(rating().second == json{{"ready", true}, {"rating", 4.0}});
    CHECK(History(cli)["turns"].size() == 5);

    auto clear = cli.Post("/clear");
    REQUIRE(clear);
    CHECK(clear->status == 200);
    CHECK(History(cli)["turns"].size() == 1);
    CHECK(History(cli)["turns"][0]["text"] == service->config().seed_prompt);
    CHECK(cli.Delete("/clear")->status == 200);
    CHECK(History(cli)["turns"].size() == 1);
    CHECK(rating().second["ready"] == false);

    httplib::Headers ghost = {{"X-Session", "ghost"}};
    CHECK(cli.Get("/history", ghost)->status == 404);
    CHECK(cli.Get("/analyze", ghost)->status == 404);
    CHECK(cli.Get("/rating", ghost)->status == 404);
    CHECK(cli.Post("/clear", ghost, "", "text/plain")->status == 404);
    CHECK(cli.Get("/analyze", httplib::Headers{{"X-Session", "bad/id"}})->status == 404);

    // A new session starts on its first talk.
    auto res = testing::PostAudio(cli, AnswerClip(), "audio/wav", "second");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->get_header_value("X-Session") == "second");
    CHECK(History(cli, "second")["turns"].size() == 3);
    CHECK(History(cli)["turns"].size() == 1);
    CHECK(testing::PostAudio(cli, AnswerClip(), "audio/wav", "bad/id")->status == 400);
  }

  TEST_CASE("concurrent talk over http gets 409") {
    TempDir dir;
    Mocks mocks;
    auto gate = std::make_shared<GateTranscriber>();
    auto service = MakeService(dir, mocks, Providers{gate, nullptr, nullptr});
    testing::RunningFrontend server(service);
    auto first = std::async(std::launch::async, [&] {
      auto cli = server.Client();
      return testing::PostAudio(cli, AnswerClip())->status;
    });
    gate->WaitEntered();
    auto cli = server.Client();
    CHECK(testing::PostAudio(cli, AnswerClip())->status == 409);
    gate->Release();
    CHECK(first.get() == 200);
    CHECK(History(cli)["turns"].size() == 3);
    CHECK(testing::CountFiles(service->config().temp_dir) == 0);
  }

  TEST_CASE("cors preflight and health") {
    TempDir dir;
    Mocks mocks;
    testing::RunningFrontend server(MakeService(dir, mocks));
    auto cli = server.Client();
    auto res = cli.Options("/talk");
    REQUIRE(res);
    CHECK(res->status == 204);
    CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");
    CHECK(res->get_header_value("Access-Control-Allow-Headers").find("X-Session") !=
          std::string::npos);
    CHECK(json::parse(cli.Get("/healthz")->body) == json{{"status", "ok"}});
  }
}

}  // namespace
}  // namespace equiview
