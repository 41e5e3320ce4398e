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

#include "equiview/http_server.h"

#include <exception>

#include "httplib.h"
#include "json.hpp"

namespace equiview {

namespace {

using nlohmann::json;

void SendJson(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void SendError(httplib::Response& res, int status, const std::string& message,
               const std::string& stage = "") {
  json body{{"error", message}};
  if (!stage.empty()) body["stage"] = stage;
  SendJson(res, status, body);
}

std::string SessionOf(const httplib::Request& req) {
  const std::string id = req.get_header_value("X-Session");
  return id.empty() ? std::string(kDefaultSessionId) : id;
}

// Runs a handler and turns library exceptions into HTTP errors.
template <typename Fn>
void Guard(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const SessionNotFound& e) {
    SendError(res, 404, e.what());
  } catch (const SessionBusy& e) {
    SendError(res, 409, e.what());
  } catch (const ProviderError& e) {
    const std::string stage(StageName(e.stage()));
    switch (e.kind()) {
      case ProviderErrorKind::kEmptyTranscript:
        SendError(res, 422, e.what(), stage);
        break;
      case ProviderErrorKind::kUnsupportedMedia:
        SendError(res, 415, e.what(), stage);
        break;
      default:
        SendError(res, 502, e.what(), stage);
    }
  } catch (const InvalidArgument& e) {
    SendError(res, 400, e.what());
  } catch (const StorageError& e) {
    SendError(res, 500, e.what());
  } catch (const std::exception& e) {
    SendError(res, 500, e.what());
  }
}

}  // namespace

struct HttpFrontend::Impl {
  std::shared_ptr<InterviewService> service;
  httplib::Server server;
  bool bound = false;

  void Talk(const httplib::Request& req, httplib::Response& res) {
    if (!req.is_multipart_form_data() || !req.has_file("file")) {
      SendError(res, 400, "expected multipart/form-data with a 'file' field");
      return;
    }
    const auto file = req.get_file_value("file");
    const auto media_type = ParseMediaType(file.content_type);
    if (!media_type) {
      SendError(res, 415, "unsupported media type '" + file.content_type +
                              "' (accepted: audio/wav, audio/mpeg, audio/webm)");
      return;
    }
    if (file.content.empty()) {
      SendError(res, 400, "uploaded file is empty");
      return;
    }
    const std::string session = SessionOf(req);
    TalkResult result =
        service->HandleTalk(session, AudioBlob(file.content, *media_type));

    std::shared_ptr<AudioStream> stream = std::move(result.audio);
    res.status = 200;
    res.set_header("X-Session", session);
    res.set_chunked_content_provider(
        std::string(MediaTypeName(stream->media_type())),
        [stream](std::size_t, httplib::DataSink& sink) {
          try {
            if (auto chunk = stream->NextChunk()) {
              return sink.write(chunk->data(), chunk->size());
            }
            sink.done();
            return true;
          } catch (const std::exception&) {
            // Headers are already out; cutting the connection is the only
            // signal left.
            return false;
          }
        });
  }

  void Routes() {
    server.set_payload_max_length(kMaxUploadBytes);
    server.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Origin", "*");
      res.set_header("Access-Control-Expose-Headers", "X-Session");
    });
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
      res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type, X-Session");
    });
    server.set_exception_handler(
        [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
          try {
            std::rethrow_exception(ep);
          } catch (const std::exception& e) {
            SendError(res, 500, e.what());
          } catch (...) {
            SendError(res, 500, "internal error");
          }
        });

    server.Post("/talk", [this](const httplib::Request& req, httplib::Response& res) {
      Guard(res, [&] { Talk(req, res); });
    });
    server.Get("/analyze", [this](const httplib::Request& req, httplib::Response& res) {
      Guard(res, [&] {
        SendJson(res, 200, ReportToJson(service->HandleAnalyze(SessionOf(req))));
      });
    });
    auto clear = [this](const httplib::Request& req, httplib::Response& res) {
      Guard(res, [&] {
        service->HandleClear(SessionOf(req));
        SendJson(res, 200, json{{"cleared", true}});
      });
    };
    server.Post("/clear", clear);
    server.Delete("/clear", clear);
    server.Get("/history", [this](const httplib::Request& req, httplib::Response& res) {
      Guard(res, [&] {
        SendJson(res, 200, LogToJson(service->HandleHistory(SessionOf(req))));
      });
    });
    server.Get("/rating", [this](const httplib::Request& req, httplib::Response& res) {
      Guard(res, [&] {
        const auto rating = service->HandleRating(SessionOf(req));
        SendJson(res, 200,
                 json{{"ready", rating.has_value()},
                      {"rating", rating ? json(rating->value()) : json(nullptr)}});
      });
    });
    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      SendJson(res, 200, json{{"status", "ok"}});
    });
  }
};

HttpFrontend::HttpFrontend(std::shared_ptr<InterviewService> service)
    : impl_(std::make_unique<Impl>()) {
  impl_->service = std::move(service);
  impl_->Routes();
}

HttpFrontend::~HttpFrontend() {
  if (impl_->server.is_running()) impl_->server.stop();
}

int HttpFrontend::Bind(const std::string& host, int port) {
  int bound = -1;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    bound = port;
  }
  if (bound < 0) {
    throw Error("cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->bound = true;
  return bound;
}

void HttpFrontend::Run() {
  if (!impl_->bound) throw Error("HttpFrontend::Run called before Bind");
  impl_->server.listen_after_bind();
}

void HttpFrontend::Stop() { impl_->server.stop(); }

void HttpFrontend::WaitUntilReady() const { impl_->server.wait_until_ready(); }

}  // namespace equiview
