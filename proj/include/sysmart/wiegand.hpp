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

// Wiegand 26 reader interface: frame codec and a D0/D1 line simulation.
//
// Frame layout, transmission order (MSB first):
//   bit 0       leading parity, even over payload bits 23..12
//   bits 1..24  payload, bit 23 first
//   bit 25      trailing parity, odd over payload bits 11..0

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sysmart/error.hpp"

namespace sysmart::wiegand {

inline constexpr std::size_t kFrameBits = 26;
inline constexpr std::uint32_t kPayloadLimit = 1u << 24;

struct Wiegand26Frame {
  bool leading_parity = false;
  std::uint32_t payload = 0;
  bool trailing_parity = false;

  friend bool operator==(const Wiegand26Frame&, const Wiegand26Frame&) = default;
};

enum class ParityHalf { kUpper, kLower };

/// Raised by decode_frame / parse_line_events when a parity group fails.
class ParityError : public Error {
 public:
  explicit ParityError(ParityHalf half);
  ParityHalf half() const noexcept { return half_; }

 private:
  ParityHalf half_;
};

using FrameBits = std::array<std::uint8_t, kFrameBits>;

Wiegand26Frame encode_frame(std::uint32_t payload);

/// Bits in transmission order, each 0 or 1.
FrameBits frame_bits(const Wiegand26Frame& frame);

/// Checks length, bit values and both parity groups. The upper group is
/// checked first, so a frame with both groups broken reports kUpper.
std::uint32_t decode_frame(std::span<const std::uint8_t> bits);

std::string payload_to_tag_id(std::uint32_t payload);
std::uint32_t tag_id_to_payload(std::string_view tag_id);
bool is_tag_id(std::string_view text) noexcept;

/// "0101..." <-> bits. Whitespace is not accepted.
std::string to_bit_string(std::span<const std::uint8_t> bits);
std::vector<std::uint8_t> parse_bit_string(std::string_view text);

// ---------------------------------------------------------------------------
// Line simulation
// ---------------------------------------------------------------------------

enum class Line : std::uint8_t { kD0, kD1 };

struct LineEvent {
  Line line = Line::kD0;
  std::uint64_t time_us = 0;  // pulse start, relative to the first pulse

  friend bool operator==(const LineEvent&, const LineEvent&) = default;
};

struct LineTiming {
  std::uint64_t pulse_width_us = 50;
  std::uint64_t bit_period_us = 2000;
  std::uint64_t frame_timeout_us = 50000;
};

std::vector<LineEvent> emit_line_events(const Wiegand26Frame& frame,
                                        const LineTiming& timing = {});

/// Reassembles one frame from pulses. A gap longer than the frame timeout
/// before 26 pulses arrived is a truncation; extra pulses are a framing
/// error; non-increasing times are a format error.
Wiegand26Frame parse_line_events(std::span<const LineEvent> events,
                                 const LineTiming& timing = {});

}  // namespace sysmart::wiegand
