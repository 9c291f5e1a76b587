// Copyright 2026 The lato Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LATO_ERROR_HPP_
#define LATO_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace lato {

enum class ErrorKind {
  kSchema,      // malformed landmark / manifest / model document
  kDegenerate,  // geometry too degenerate to measure
  kUnit,        // canvas or normalization mismatch
  kRange,       // value outside its admissible range
  kParse,       // instruction grammar
  kConfig,
  kShape,
  kNumeric,     // NaN / Inf encountered
  kIo,
  kSanity,      // landmark prediction failed geometric checks
  kScorer,      // external scorer failure
};

std::string_view ToString(ErrorKind kind);

// The single exception type thrown by the library. Callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Parse errors carry the byte offset where matching stopped.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : Error(ErrorKind::kParse, message + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace lato

#endif  // LATO_ERROR_HPP_
