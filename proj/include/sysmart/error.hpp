// Copyright 2026 The SysMART Authors
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

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sysmart {

/// Failure categories shared by every module. The CLI maps them onto exit
/// codes and the HTTP API onto status codes, so keep the set small.
enum class ErrorCode {
  kRange,           // value outside its bit width or domain
  kFraming,         // wrong frame / buffer length
  kParity,          // Wiegand parity check failed
  kTruncation,      // line-event stream ended early
  kFormat,          // malformed text or binary encoding
  kArgument,        // invalid argument to an otherwise valid call
  kValidation,      // malformed input document or field
  kLookup,          // unknown tag id
  kRouting,         // no path between two cells
  kReference,       // unknown store / cart / product / ticket
  kState,           // operation not allowed in the current state
  kTamper,          // write-once field already set
  kCapacity,        // bounded region is full
  kClock,           // RTC value older than recorded history
  kAuthentication,  // wrong tag password
  kTransition,      // illegal ticket status transition
  kIo,              // file or network failure
};

std::string_view to_string(ErrorCode code) noexcept;
/// Inverse of to_string, for error categories received over the wire.
std::optional<ErrorCode> parse_error_code(std::string_view name) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + " error: " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sysmart
