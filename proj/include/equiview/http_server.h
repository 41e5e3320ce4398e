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

// HTTP binding of InterviewService.
//
//   POST        /talk     multipart field "file" -> audio (chunked)
//   GET         /analyze  {"score", "label", "matched_tokens", "turns_analyzed"}
//   POST|DELETE /clear    {"cleared": true}
//   GET         /history  conversation log document
//   GET         /rating   {"ready": bool, "rating": number|null}
//   GET         /healthz  {"status": "ok"}
//
// The session is chosen by the X-Session header ("default" when absent).
// Errors are JSON {"error": message} plus "stage" for provider failures:
// 400 bad request, 404 unknown session, 409 exchange in flight, 415
// unsupported upload type, 422 no speech in the upload, 502 provider
// failure, 500 storage failure.

#ifndef EQUIVIEW_HTTP_SERVER_H_
#define EQUIVIEW_HTTP_SERVER_H_

#include <cstddef>
#include <memory>
#include <string>

#include "equiview/service.h"

namespace equiview {

inline constexpr std::size_t kMaxUploadBytes = 25 * 1024 * 1024;

class HttpFrontend {
 public:
  explicit HttpFrontend(std::shared_ptr<InterviewService> service);
  ~HttpFrontend();

  HttpFrontend(const HttpFrontend&) = delete;
  HttpFrontend& operator=(const HttpFrontend&) = delete;

  // Binds without serving. Port 0 picks a free port; the bound port is
  // returned. Throws Error when the address cannot be bound.
  int Bind(const std::string& host, int port);
  // Serves until Stop(). Requires a successful Bind.
  void Run();
  void Stop();
  void WaitUntilReady() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace equiview

#endif  // EQUIVIEW_HTTP_SERVER_H_
