// mtml/common.h

// Copyright 2026  The mtml Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef MTML_COMMON_H_
#define MTML_COMMON_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mtml {

// Error categories map one-to-one onto CLI exit codes:
// ConfigError -> 2, NumericError -> 3, IoError / ParseError -> 4.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parse failures on serialized artifacts carry the byte offset at which the
// input stopped making sense.
class ParseError : public IoError {
 public:
  ParseError(const std::string &what, uint64_t byte_offset)
      : IoError(what + " (at byte offset " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}
  uint64_t ByteOffset() const { return byte_offset_; }

 private:
  uint64_t byte_offset_;
};

// Shortest text form of a double that round-trips exactly through strtod.
std::string FormatDouble(double value);

}  // namespace mtml

#endif  // MTML_COMMON_H_
