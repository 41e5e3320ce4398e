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

#ifndef EQUIVIEW_SRC_EMBEDDED_DATA_H_
#define EQUIVIEW_SRC_EMBEDDED_DATA_H_

#include <string_view>

namespace equiview::internal {

// Contents of data/default_lexicon.tsv and data/candidates.csv, baked in at
// configure time (see cmake/embedded_data.cc.in).
std::string_view EmbeddedLexiconTsv();
std::string_view EmbeddedCandidatesCsv();

}  // namespace equiview::internal

#endif  // EQUIVIEW_SRC_EMBEDDED_DATA_H_
