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

#include <cstdint>
#include <string>
#include <string_view>

namespace sysmart {

/// "YYYY-MM-DDTHH:MM:SSZ" for a unix time in seconds.
std::string format_iso8601(std::int64_t unix_seconds);

/// Inverse of format_iso8601; also accepts a trailing "+00:00". Throws
/// kFormat on anything else.
std::int64_t parse_iso8601(std::string_view text);

}  // namespace sysmart
