// Copyright 2026 The ptree-engine Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PTREE_ERRORS_HPP_
#define PTREE_ERRORS_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace ptree {

/// Base of every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid caller-supplied values (empty grids, out-of-range values, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

class CoordinateError : public Error {
 public:
  using Error::Error;
};

/// Operands that cannot be combined (side or metadata mismatch).
class IncompatibleError : public Error {
 public:
  using Error::Error;
};

class PathError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

/// Reference statistics with zero spread.
class DegenerateReferenceError : public Error {
 public:
  using Error::Error;
};

class SpotMapError : public Error {
 public:
  using Error::Error;
};

/// Malformed serialized data, with source name and byte offset when known.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what,
                       std::optional<std::size_t> offset = std::nullopt,
                       std::string source = {})
      : Error(what), offset_(offset), source_(std::move(source)) {}

  std::optional<std::size_t> offset() const { return offset_; }
  const std::string& source() const { return source_; }

 private:
  std::optional<std::size_t> offset_;
  std::string source_;
};

}  // namespace ptree

#endif  // PTREE_ERRORS_HPP_
