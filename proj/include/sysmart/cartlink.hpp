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

// Cart -> server position packet and the random-delay transmission model.
//
// Wire layout (10 octets, 80 bits):
//   0..1  store_id, big-endian
//   2..3  cart_id, big-endian
//   4..9  tag_id, 6 ASCII characters [0-9A-F]

#include <array>
#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sysmart/error.hpp"

namespace sysmart::cartlink {

using StoreId = std::uint16_t;
using CartId = std::uint16_t;

inline constexpr std::size_t kPacketOctets = 10;
inline constexpr std::size_t kPacketBits = kPacketOctets * 8;
inline constexpr std::uint32_t kDefaultOverheadBits = 48;
inline constexpr double kDefaultRateBps = 54e6;

struct CartPositionPacket {
  StoreId store_id = 0;
  CartId cart_id = 0;
  std::string tag_id;

  friend bool operator==(const CartPositionPacket&, const CartPositionPacket&) = default;
};

using PacketBytes = std::array<std::uint8_t, kPacketOctets>;

PacketBytes encode_packet(const CartPositionPacket& packet);
CartPositionPacket decode_packet(std::span<const std::uint8_t> octets);

/// 20 hex characters; decoding accepts either case.
std::string packet_to_hex(const CartPositionPacket& packet);
CartPositionPacket packet_from_hex(std::string_view hex);

/// Seconds on air for a packet of payload + overhead bits at `rate_bps`.
double packet_airtime(std::uint64_t payload_bits, std::uint64_t overhead_bits,
                      double rate_bps);

// ---------------------------------------------------------------------------
// Random-delay transmission
// ---------------------------------------------------------------------------

struct Transmission {
  CartId cart_id = 0;
  double start_time = 0.0;  // seconds from window start
  double duration = 0.0;

  friend bool operator==(const Transmission&, const Transmission&) = default;
};

struct TransmissionSchedule {
  std::vector<Transmission> entries;
  double window = 1.0;

  friend bool operator==(const TransmissionSchedule&, const TransmissionSchedule&) = default;
};

/// Uniform double in [0, 1) from the top 53 bits of one engine draw. Used
/// instead of std::uniform_real_distribution so replays do not depend on the
/// standard library implementation.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// One uniform start per cart, drawn in the order of `cart_ids`.
TransmissionSchedule schedule_transmissions(std::span<const CartId> cart_ids,
                                            double window, double duration,
                                            std::mt19937_64& rng);
TransmissionSchedule schedule_transmissions(std::span<const CartId> cart_ids,
                                            double window, double duration,
                                            std::uint64_t seed);

using CartPair = std::pair<CartId, CartId>;  // first < second

/// Pairs whose [start, start + duration) intervals overlap.
std::set<CartPair> detect_collisions(const TransmissionSchedule& schedule);

/// Probability that at least one pair among `n` uniform starts overlaps.
/// Exact for starts on [0, window): no overlap iff every sorted gap is at
/// least `duration`, which happens with probability (1 - (n-1)d/T)^n.
double analytic_collision_probability(std::uint32_t n, double duration, double window);

/// C(n,2) times the exact pairwise overlap probability 2d/T - (d/T)^2.
double expected_colliding_pairs(std::uint32_t n, double duration, double window);

struct CollisionStats {
  std::uint64_t windows = 0;
  std::uint64_t windows_with_collision = 0;
  std::uint64_t colliding_pairs = 0;

  double collision_rate() const {
    return windows ? static_cast<double>(windows_with_collision) / windows : 0.0;
  }
  double mean_pairs() const {
    return windows ? static_cast<double>(colliding_pairs) / windows : 0.0;
  }
};

/// Monte Carlo over independent windows using schedule_transmissions and
/// detect_collisions.
CollisionStats simulate_windows(std::uint32_t n, double duration, double window,
                                std::uint64_t windows, std::uint64_t seed);

}  // namespace sysmart::cartlink
