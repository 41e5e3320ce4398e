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


// Loopback HTTP helpers for tests. Nothing here leaves 127.0.0.1.

#ifndef EQUIVIEW_TESTS_HTTP_SUPPORT_H_
#define EQUIVIEW_TESTS_HTTP_SUPPORT_H_

#include <memory>
#include <string>
#include <thread>

#include "equiview/http_server.h"
#include "httplib.h"

namespace equiview::testing {

// httplib::Server listening on an ephemeral loopback port.
class FakeServer {
 public:
  FakeServer() = default;
  ~FakeServer() { Stop(); }
  FakeServer(const FakeServer&) = delete;
  FakeServer& operator=(const FakeServer&) = delete;

  httplib::Server& server() { return server_; }

  void Start() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void Stop() {
    if (thread_.joinable()) {
      server_.stop();
      thread_.join();
    }
  }
  int port() const { return port_; }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

// HttpFrontend serving a service on an ephemeral loopback port.
class RunningFrontend {
 public:
  explicit RunningFrontend(std::shared_ptr<InterviewService> service)
      : frontend_(std::move(service)) {
    port_ = frontend_.Bind("127.0.0.1", 0);
    thread_ = std::thread([this] { frontend_.Run(); });
    frontend_.WaitUntilReady();
  }
  ~RunningFrontend() {
    frontend_.Stop();
    thread_.join();
  }
  RunningFrontend(const RunningFrontend&) = delete;
  RunningFrontend& operator=(const RunningFrontend&) = delete;

  int port() const { return port_; }
  httplib::Client Client() const {
    httplib::Client cli("127.0.0.1", port_);
    cli.set_read_timeout(std::chrono::seconds(10));
    return cli;
  }

 private:
  HttpFrontend frontend_;
  std::thread thread_;
  int port_ = 0;
};

inline httplib::Result PostAudio(httplib::Client& cli, const std::string& bytes,
                                 const std::string& content_type = "audio/wav",
                                 const std::string& session = "") {
  httplib::MultipartFormDataItems items = {{"file", bytes, "clip.wav", content_type}};
  httplib::Headers headers;
  if (!session.empty()) headers.emplace("X-Session", session);
  return cli.Post("/talk", headers, items);
}

inline httplib::Headers SessionHeader(const std::string& session) {
  if (session.empty()) return {};
  return {{"X-Session", session}};
}

}  // namespace equiview::testing

#endif  // EQUIVIEW_TESTS_HTTP_SUPPORT_H_
