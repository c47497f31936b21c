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

#include "sysmart/wiegand.hpp"

#include <bit>
#include <cstdio>

namespace sysmart::wiegand {
namespace {

constexpr std::uint32_t kUpperMask = 0xFFF000;
constexpr std::uint32_t kLowerMask = 0x000FFF;

bool odd_ones(std::uint32_t v) { return (std::popcount(v) & 1) != 0; }

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

ParityError::ParityError(ParityHalf half)
    : Error(ErrorCode::kParity,
            half == ParityHalf::kUpper ? "upper half (even parity) failed"
                                       : "lower half (odd parity) failed"),
      half_(half) {}

Wiegand26Frame encode_frame(std::uint32_t payload) {
  if (payload >= kPayloadLimit) {
    throw Error(ErrorCode::kRange, "payload exceeds 24 bits");
  }
  Wiegand26Frame frame;
  frame.payload = payload;
  // Even parity: the group including the parity bit has an even count.
  frame.leading_parity = odd_ones(payload & kUpperMask);
  // Odd parity: the group including the parity bit has an odd count.
  frame.trailing_parity = !odd_ones(payload & kLowerMask);
  return frame;
}

FrameBits frame_bits(const Wiegand26Frame& frame) {
  FrameBits bits{};
  bits[0] = frame.leading_parity ? 1 : 0;
  for (std::size_t i = 0; i < 24; ++i) {
    bits[1 + i] = static_cast<std::uint8_t>((frame.payload >> (23 - i)) & 1u);
  }
  bits[25] = frame.trailing_parity ? 1 : 0;
  return bits;
}

std::uint32_t decode_frame(std::span<const std::uint8_t> bits) {
  if (bits.size() != kFrameBits) {
    throw Error(ErrorCode::kFraming,
                "expected 26 bits, got " + std::to_string(bits.size()));
  }
  std::uint32_t payload = 0;
  for (std::size_t i = 0; i < kFrameBits; ++i) {
    if (bits[i] > 1) throw Error(ErrorCode::kFormat, "bit value not 0 or 1");
  }
  for (std::size_t i = 1; i <= 24; ++i) payload = (payload << 1) | bits[i];

  const bool upper_odd = odd_ones(payload & kUpperMask) != (bits[0] == 1);
  if (upper_odd) throw ParityError(ParityHalf::kUpper);
  const bool lower_odd = odd_ones(payload & kLowerMask) != (bits[25] == 1);
  if (!lower_odd) throw ParityError(ParityHalf::kLower);
  return payload;
}

std::string payload_to_tag_id(std::uint32_t payload) {
  if (payload >= kPayloadLimit) {
    throw Error(ErrorCode::kRange, "payload exceeds 24 bits");
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "%06X", static_cast<unsigned>(payload));
  return buf;
}

bool is_tag_id(std::string_view text) noexcept {
  if (text.size() != 6) return false;
  for (char c : text) {
    if (hex_value(c) < 0) return false;
  }
  return true;
}

std::uint32_t tag_id_to_payload(std::string_view tag_id) {
  if (!is_tag_id(tag_id)) {
    throw Error(ErrorCode::kFormat,
                "tag id must be 6 uppercase hex characters: '" +
                    std::string(tag_id) + "'");
  }
  std::uint32_t v = 0;
  for (char c : tag_id) v = (v << 4) | static_cast<std::uint32_t>(hex_value(c));
  return v;
}

std::string to_bit_string(std::span<const std::uint8_t> bits) {
  std::string out;
  out.reserve(bits.size());
  for (auto b : bits) out.push_back(b ? '1' : '0');
  return out;
}

std::vector<std::uint8_t> parse_bit_string(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw Error(ErrorCode::kFormat, "bit string may only contain 0 and 1");
    }
    bits.push_back(c == '1' ? 1 : 0);
  }
  return bits;
}

std::vector<LineEvent> emit_line_events(const Wiegand26Frame& frame,
                                        const LineTiming& timing) {
  const auto bits = frame_bits(frame);
  std::vector<LineEvent> events;
  events.reserve(kFrameBits);
  for (std::size_t i = 0; i < kFrameBits; ++i) {
    events.push_back({bits[i] ? Line::kD1 : Line::kD0, i * timing.bit_period_us});
  }
  return events;
}

Wiegand26Frame parse_line_events(std::span<const LineEvent> events,
                                 const LineTiming& timing) {
  std::vector<std::uint8_t> bits;
  bits.reserve(kFrameBits);
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (i > 0) {
      if (events[i].time_us <= events[i - 1].time_us) {
        throw Error(ErrorCode::kFormat, "line events out of order");
      }
      if (events[i].time_us - events[i - 1].time_us > timing.frame_timeout_us) {
        if (bits.size() < kFrameBits) {
          throw Error(ErrorCode::kTruncation,
                      "frame timed out after " + std::to_string(bits.size()) +
                          " bits");
        }
        break;
      }
    }
    if (bits.size() == kFrameBits) {
      throw Error(ErrorCode::kFraming, "more than 26 pulses in one frame");
    }
    bits.push_back(events[i].line == Line::kD1 ? 1 : 0);
  }
  if (bits.size() < kFrameBits) {
    throw Error(ErrorCode::kTruncation,
                "stream ended after " + std::to_string(bits.size()) + " bits");
  }
  const std::uint32_t payload = decode_frame(bits);
  return Wiegand26Frame{bits[0] == 1, payload, bits[25] == 1};
}

}  // namespace sysmart::wiegand
