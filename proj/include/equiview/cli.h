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

#ifndef EQUIVIEW_CLI_H_
#define EQUIVIEW_CLI_H_

#include <ostream>

namespace equiview {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `equiview` tool:
//   serve      run the interview HTTP service
//   analyze    bias report from a dataset CSV (or --fixture)
//   sentiment  polarity report for a text file or conversation log
//   fixtures   print the bundled candidate dataset
// Results go to `out`, diagnostics to `err`.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace equiview

#endif  // EQUIVIEW_CLI_H_
