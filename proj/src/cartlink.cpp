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

#include "sysmart/cartlink.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sysmart/wiegand.hpp"

namespace sysmart::cartlink {
namespace {

constexpr char kHex[] = "0123456789ABCDEF";

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

void check_window(double window, double duration) {
  if (!(window > 0.0)) throw Error(ErrorCode::kArgument, "window must be positive");
  if (!(duration > 0.0)) throw Error(ErrorCode::kArgument, "duration must be positive");
  if (duration >= window) {
    throw Error(ErrorCode::kArgument, "duration must be shorter than the window");
  }
}

}  // namespace

PacketBytes encode_packet(const CartPositionPacket& packet) {
  if (!wiegand::is_tag_id(packet.tag_id)) {
    throw Error(ErrorCode::kFormat, "tag_id must match [0-9A-F]{6}");
  }
  PacketBytes out{};
  out[0] = static_cast<std::uint8_t>(packet.store_id >> 8);
  out[1] = static_cast<std::uint8_t>(packet.store_id);
  out[2] = static_cast<std::uint8_t>(packet.cart_id >> 8);
  out[3] = static_cast<std::uint8_t>(packet.cart_id);
  std::copy(packet.tag_id.begin(), packet.tag_id.end(), out.begin() + 4);
  return out;
}

CartPositionPacket decode_packet(std::span<const std::uint8_t> octets) {
  if (octets.size() != kPacketOctets) {
    throw Error(ErrorCode::kFraming,
                "packet must be 10 octets, got " + std::to_string(octets.size()));
  }
  CartPositionPacket p;
  p.store_id = static_cast<StoreId>((octets[0] << 8) | octets[1]);
  p.cart_id = static_cast<CartId>((octets[2] << 8) | octets[3]);
  p.tag_id.assign(octets.begin() + 4, octets.end());
  if (!wiegand::is_tag_id(p.tag_id)) {
    throw Error(ErrorCode::kFormat, "tag_id octets are not [0-9A-F]");
  }
  return p;
}

std::string packet_to_hex(const CartPositionPacket& packet) {
  const auto bytes = encode_packet(packet);
  std::string out;
  out.reserve(2 * kPacketOctets);
  for (auto b : bytes) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xF]);
  }
  return out;
}

CartPositionPacket packet_from_hex(std::string_view hex) {
  if (hex.size() != 2 * kPacketOctets) {
    throw Error(ErrorCode::kFormat, "packet hex must be 20 characters");
  }
  PacketBytes bytes{};
  for (std::size_t i = 0; i < kPacketOctets; ++i) {
    const int hi = hex_nibble(hex[2 * i]);
    const int lo = hex_nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw Error(ErrorCode::kFormat, "invalid hex digit");
    bytes[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return decode_packet(bytes);
}

double packet_airtime(std::uint64_t payload_bits, std::uint64_t overhead_bits,
                      double rate_bps) {
  if (!(rate_bps > 0.0)) throw Error(ErrorCode::kArgument, "rate must be positive");
  return static_cast<double>(payload_bits + overhead_bits) / rate_bps;
}

TransmissionSchedule schedule_transmissions(std::span<const CartId> cart_ids,
                                            double window, double duration,
                                            std::mt19937_64& rng) {
  check_window(window, duration);
  TransmissionSchedule s;
  s.window = window;
  s.entries.reserve(cart_ids.size());
  for (CartId id : cart_ids) {
    s.entries.push_back({id, uniform01(rng) * window, duration});
  }
  return s;
}

TransmissionSchedule schedule_transmissions(std::span<const CartId> cart_ids,
                                            double window, double duration,
                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return schedule_transmissions(cart_ids, window, duration, rng);
}

std::set<CartPair> detect_collisions(const TransmissionSchedule& schedule) {
  std::vector<const Transmission*> order;
  order.reserve(schedule.entries.size());
  for (const auto& e : schedule.entries) order.push_back(&e);
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    return a->start_time < b->start_time;
  });

  std::set<CartPair> pairs;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double end = order[i]->start_time + order[i]->duration;
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (order[j]->start_time >= end) break;
      if (order[i]->cart_id == order[j]->cart_id) continue;
      pairs.insert(std::minmax(order[i]->cart_id, order[j]->cart_id));
    }
  }
  return pairs;
}

double analytic_collision_probability(std::uint32_t n, double duration, double window) {
  if (!(window > duration) || duration < 0.0) {
    throw Error(ErrorCode::kArgument, "window must exceed duration");
  }
  if (n <= 1) return 0.0;
  const double blocked = (n - 1) * (duration / window);
  if (blocked >= 1.0) return 1.0;
  // 1 - (1 - blocked)^n without cancellation for tiny `blocked`.
  return -std::expm1(n * std::log1p(-blocked));
}

double expected_colliding_pairs(std::uint32_t n, double duration, double window) {
  if (!(window > duration) || duration < 0.0) {
    throw Error(ErrorCode::kArgument, "window must exceed duration");
  }
  const double r = duration / window;
  const double pairs = 0.5 * static_cast<double>(n) * (n > 0 ? n - 1 : 0);
  return pairs * (2.0 * r - r * r);
}

CollisionStats simulate_windows(std::uint32_t n, double duration, double window,
                                std::uint64_t windows, std::uint64_t seed) {
  std::vector<CartId> ids(n);
  std::iota(ids.begin(), ids.end(), CartId{1});
  std::mt19937_64 rng(seed);
  CollisionStats stats;
  stats.windows = windows;
  for (std::uint64_t w = 0; w < windows; ++w) {
    const auto schedule = schedule_transmissions(ids, window, duration, rng);
    const auto pairs = detect_collisions(schedule);
    if (!pairs.empty()) ++stats.windows_with_collision;
    stats.colliding_pairs += pairs.size();
  }
  return stats;
}

}  // namespace sysmart::cartlink
