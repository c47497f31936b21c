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

#include "sysmart/error.hpp"

namespace sysmart {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kRange: return "range";
    case ErrorCode::kFraming: return "framing";
    case ErrorCode::kParity: return "parity";
    case ErrorCode::kTruncation: return "truncation";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kArgument: return "argument";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kLookup: return "lookup";
    case ErrorCode::kRouting: return "routing";
    case ErrorCode::kReference: return "reference";
    case ErrorCode::kState: return "state";
    case ErrorCode::kTamper: return "tamper";
    case ErrorCode::kCapacity: return "capacity";
    case ErrorCode::kClock: return "clock";
    case ErrorCode::kAuthentication: return "authentication";
    case ErrorCode::kTransition: return "transition";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

std::optional<ErrorCode> parse_error_code(std::string_view name) noexcept {
  for (int i = 0; i <= static_cast<int>(ErrorCode::kIo); ++i) {
    const auto code = static_cast<ErrorCode>(i);
    if (to_string(code) == name) return code;
  }
  return std::nullopt;
}

}  // namespace sysmart
