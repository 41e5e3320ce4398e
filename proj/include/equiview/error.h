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

#ifndef EQUIVIEW_ERROR_H_
#define EQUIVIEW_ERROR_H_

#include <stdexcept>
#include <string>

namespace equiview {

// Root of every exception thrown by this library. Callers that only need a
// one-line cause can catch this and print what().
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

// Malformed input. `field` names the offending key, column or line.
class ParseError : public Error {
 public:
  ParseError(std::string field, const std::string& message)
      : Error(message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Well-formed input whose values break a domain constraint.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class StorageError : public Error {
 public:
  StorageError(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace equiview

#endif  // EQUIVIEW_ERROR_H_
