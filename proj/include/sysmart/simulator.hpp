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

// Discrete-time store simulation driving every other module end to end.
//
// Time advances in fixed ticks. Within a tick the steps run in this order:
//   1. deliver transmissions (and report collisions) whose end time <= t
//   2. at a window start: emit retries for last window's collisions, then
//      schedule this window's transmissions (the only RNG draws, one per
//      sending cart in ascending cart id)
//   3. move carts and take reader samples; a tag entering a reader's field
//      produces one read, pushed through the Wiegand line codec
//   4. shopper actions due by t (item picks, lane joins)
//   5. lane service
//   6. food-tag sampling and plant events
//   7. local -> main synchronization
// All randomness comes from one mt19937_64 seeded with Scenario::seed.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sysmart/backend.hpp"
#include "sysmart/foodtrack.hpp"
#include "sysmart/positioning.hpp"

namespace sysmart::sim {

using backend::LaneId;
using backend::ProductId;
using backend::UnixTime;
using cartlink::CartId;
using positioning::Cell;
using positioning::LocationId;
using positioning::Point;

struct StoreInfo {
  cartlink::StoreId store_id = 1;
  std::string name;
  double lat = 0.0;
  double lon = 0.0;
};

struct ProductSpec {
  ProductId product_id = 0;
  std::string name;
  LocationId location_id = 0;
  std::uint32_t count = 0;
};

struct CartSpec {
  CartId cart_id = 0;
  Cell start;
};

struct LaneSpec {
  LaneId lane_id = 0;
  std::vector<std::uint32_t> queue;
};

struct ShopperSpec {
  CartId cart_id = 0;
  std::vector<ProductId> waypoints;
  double speed = 1.0;       // m/s
  double start_time = 0.0;  // s
  double dwell = 5.0;       // s spent at each waypoint
  /// Where the cart is left; the shopper then joins the fastest lane.
  std::optional<Cell> checkout;
};

struct ProfileSegment {
  double time = 0.0;  // s from scenario start; the segment holds until the next one
  double temp_c = 0.0;
  double rh = 0.0;
};

struct PlantEventSpec {
  double time = 0.0;
  std::uint16_t plant_id = 0;
  foodtrack::PlantEventKind kind = foodtrack::PlantEventKind::kArrival;
};

struct FoodTagSpec {
  std::string tag_id;
  foodtrack::TagConfig config;
  std::size_t log_region_octets = foodtrack::kDefaultLogRegionOctets;
  std::vector<ProfileSegment> profile;
  std::vector<PlantEventSpec> plant_events;
};

struct TransmissionPolicy {
  bool on_new_read = true;
  double heartbeat = 1.0;  // s between unconditional transmissions; 0 disables
};

struct Scenario {
  std::uint64_t seed = 1;
  UnixTime epoch = 0;
  double duration = 60.0;
  double tick = 0.1;
  double window = 1.0;
  double read_range = positioning::kDefaultReadRange;
  double rate_bps = cartlink::kDefaultRateBps;
  std::uint32_t overhead_bits = cartlink::kDefaultOverheadBits;
  TransmissionPolicy transmission;
  double sync_period = 5.0;  // 0 disables
  double lane_service_rate = 0.5;  // items per second per lane
  double checkout_overhead = 0.0;

  StoreInfo store;
  positioning::StoreGrid grid;
  positioning::TagMap tags;
  std::vector<ProductSpec> products;
  std::vector<CartSpec> carts;
  std::vector<LaneSpec> lanes;
  std::vector<ShopperSpec> shoppers;
  std::vector<FoodTagSpec> food_tags;
};

/// Throws Error(kValidation) with a field path such as "shoppers[3].speed".
void validate(const Scenario& scenario);

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario load_scenario(const std::filesystem::path& path);

/// 150 carts, 230 floor tags, six lanes, five food tags, one hour.
Scenario make_case_study_scenario(std::uint64_t seed = 7);

// ---------------------------------------------------------------------------
// Events
// ---------------------------------------------------------------------------

struct TagRead {
  CartId cart = 0;
  std::uint32_t payload = 0;
};
struct PacketSent {
  CartId cart = 0;
  std::uint32_t payload = 0;
  std::uint64_t window = 0;
  bool retry = false;
  double read_time = 0.0;
};
struct Collision {
  CartId cart = 0;
  CartId other = 0;  // lowest id it overlapped with
  std::uint64_t window = 0;
};
struct Retry {
  CartId cart = 0;
  std::uint64_t window = 0;  // the window being retried into
};
struct DbUpsert {
  CartId cart = 0;
  std::uint32_t payload = 0;
  LocationId location = 0;
  UnixTime updated_at = 0;
  std::uint64_t window = 0;
  double read_time = 0.0;
};
struct LaneJoin {
  CartId cart = 0;
  LaneId lane = 0;
  std::uint32_t items = 0;
};
struct LaneServe {
  LaneId lane = 0;
  std::uint32_t items = 0;
};
struct Pick {
  CartId cart = 0;
  ProductId product = 0;
  std::uint32_t remaining = 0;
};
struct SensorSample {
  std::uint32_t food_tag = 0;  // index into Scenario::food_tags
  std::uint16_t temp_raw = 0;
  std::uint16_t hum_raw = 0;
  bool logged = false;
};
struct PlantMark {
  std::uint32_t food_tag = 0;
  std::uint16_t plant_id = 0;
  foodtrack::PlantEventKind kind = foodtrack::PlantEventKind::kArrival;
};
struct SyncPush {
  std::uint32_t changed = 0;
};

using EventPayload = std::variant<TagRead, PacketSent, Collision, Retry, DbUpsert, LaneJoin,
                                  LaneServe, Pick, SensorSample, PlantMark, SyncPush>;

struct Event {
  double time = 0.0;
  EventPayload payload;
};

std::string_view kind_name(const EventPayload& payload);

struct WindowStat {
  std::uint32_t senders = 0;
  std::uint32_t colliding_pairs = 0;
};

struct SimulationResult {
  std::vector<Event> events;
  std::vector<WindowStat> windows;
  backend::StoreDatabase local;
  backend::StoreDatabase main;
  std::map<std::string, std::vector<std::uint8_t>> food_tag_images;  // memory_image()
  std::map<CartId, Point> final_positions;
  /// Per cart, whether its most recent read reached the database.
  std::map<CartId, bool> last_read_delivered;
};

SimulationResult run(const Scenario& scenario);

/// The local server's tables before the run starts: store, locations, tag
/// mapping, products, inventory, carts and lanes.
backend::StoreDatabase seed_database(const Scenario& scenario);

// ---------------------------------------------------------------------------
// Ground truth, from kinematics alone
// ---------------------------------------------------------------------------

struct CartTruth {
  CartId cart = 0;
  Point position;
  std::optional<std::string> tag_id;  // nearest tag within read range
  std::optional<LocationId> location;
};

/// Exact cart positions at `time`; nearest tags by exhaustive search.
std::vector<CartTruth> ground_truth(const Scenario& scenario, double time);

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

/// One JSON object per line; times printed with nine decimals.
std::string events_to_jsonl(const Scenario& scenario, const std::vector<Event>& events);
std::string events_to_csv(const Scenario& scenario, const std::vector<Event>& events);
/// Final local-server tables and food-tag dumps.
nlohmann::json final_state_json(const SimulationResult& result);
/// FNV-1a 64 over the JSON-lines log and the final state, as 16 hex digits.
std::string digest(const Scenario& scenario, const SimulationResult& result);

}  // namespace sysmart::sim
