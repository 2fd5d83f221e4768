// Copyright 2026 The dp_embed Authors
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

#ifndef DPEMBED_ERRORS_HPP_
#define DPEMBED_ERRORS_HPP_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dpembed {

// Tensor or embedding dimensions disagree with what the operation requires.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Noise calibration could not satisfy the requested privacy constraint,
// e.g. the target delta is not reachable inside the search bracket.
class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Generator training produced a non-finite loss or gradient. Carries the
// 1-based iteration at which the divergence was detected.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, int iteration)
      : std::runtime_error(what), iteration_(iteration) {}

  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

// A serialized artifact is malformed. Carries the byte offset at which
// parsing failed.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset)
      : std::runtime_error(what + " (byte offset " +
                           std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}

  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

// A serialized artifact has a format version this build does not support.
class UnsupportedVersionError : public std::runtime_error {
 public:
  UnsupportedVersionError(const std::string& what, std::uint32_t version)
      : std::runtime_error(what), version_(version) {}

  std::uint32_t version() const { return version_; }

 private:
  std::uint32_t version_;
};

}  // namespace dpembed

#endif  // DPEMBED_ERRORS_HPP_
