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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "sysmart/json_codec.hpp"
#include "sysmart/simulator.hpp"
#include "sysmart/timefmt.hpp"
#include "sysmart/wiegand.hpp"

namespace sysmart::sim {
namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& path, const std::string& message) {
  throw Error(ErrorCode::kValidation, path + ": " + message);
}

std::string at(const std::string& path, std::size_t index) {
  return path + "[" + std::to_string(index) + "]";
}

const json& array_field(const json& j, const char* key, const std::string& path) {
  static const json kEmpty = json::array();
  if (!j.contains(key)) return kEmpty;
  const auto& v = j.at(key);
  if (!v.is_array()) invalid(path.empty() ? key : path + "." + key, "expected an array");
  return v;
}

Cell cell_field(const json& j, const char* key, const std::string& path) {
  const std::string where = path + "." + key;
  if (!j.contains(key)) invalid(where, "missing");
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
    invalid(where, "expected [x, y] integers");
  }
  return {v[0].get<int>(), v[1].get<int>()};
}

json cell_json(Cell c) { return json::array({c.x, c.y}); }

UnixTime time_field(const json& j, const char* key, const std::string& path) {
  const auto text = json_field<std::string>(j, key, path);
  try {
    return parse_iso8601(text);
  } catch (const Error& e) {
    invalid(path + "." + key, e.what());
  }
}

std::optional<foodtrack::UnixSeconds> optional_date(const json& j, const char* key,
                                                     const std::string& path) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  const auto t = time_field(j, key, path);
  if (t <= 0 || t > UINT32_MAX) invalid(path + "." + key, "outside the tag's 32-bit clock range");
  return static_cast<foodtrack::UnixSeconds>(t);
}

// Ticks are fixed, so every periodic quantity must be a whole number of them.
bool whole_ticks(double period, double tick) {
  const double n = std::round(period / tick);
  return n >= 1 && std::abs(n * tick - period) < 1e-9 * std::max(1.0, period);
}

}  // namespace

void validate(const Scenario& s) {
  if (!(s.tick > 0)) invalid("tick", "must be positive");
  if (!(s.duration > 0)) invalid("duration", "must be positive");
  if (!whole_ticks(s.duration, s.tick)) invalid("duration", "must be a whole number of ticks");
  if (!whole_ticks(s.window, s.tick)) invalid("window", "must be a positive whole number of ticks");
  if (s.sync_period < 0 || (s.sync_period > 0 && !whole_ticks(s.sync_period, s.tick))) {
    invalid("sync_period", "must be 0 or a whole number of ticks");
  }
  if (!(s.read_range > 0)) invalid("read_range", "must be positive");
  if (!(s.rate_bps > 0)) invalid("radio.rate_bps", "must be positive");
  if (cartlink::packet_airtime(cartlink::kPacketBits, s.overhead_bits, s.rate_bps) >= s.window) {
    invalid("radio", "a packet must fit in one window");
  }
  if (s.transmission.heartbeat < 0) invalid("transmission.heartbeat", "must not be negative");
  if (!s.transmission.on_new_read && s.transmission.heartbeat == 0) {
    invalid("transmission", "carts would never transmit");
  }
  if (!(s.lane_service_rate > 0)) invalid("lane_service_rate", "must be positive");
  if (s.checkout_overhead < 0) invalid("checkout_overhead", "must not be negative");
  if (s.epoch < 0 || s.epoch + static_cast<UnixTime>(s.duration) > UINT32_MAX) {
    invalid("epoch", "run must fit in the 32-bit tag clock");
  }
  if (s.tags.store_id() != s.store.store_id) invalid("tags", "tag map belongs to another store");
  try {
    s.tags.validate_against(s.grid);
  } catch (const Error& e) {
    invalid("tags", e.what());
  }

  std::set<ProductId> products;
  for (std::size_t i = 0; i < s.products.size(); ++i) {
    const auto& p = s.products[i];
    const auto path = at("products", i);
    if (!products.insert(p.product_id).second) invalid(path + ".product_id", "duplicate");
    try {
      const auto cell = positioning::location_cell(p.location_id, s.grid, s.tags);
      if (!s.grid.is_open(cell)) invalid(path + ".location_id", "location is on a blocked cell");
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kValidation) throw;
      invalid(path + ".location_id", "no tag is mapped to this location");
    }
  }

  std::set<CartId> carts;
  for (std::size_t i = 0; i < s.carts.size(); ++i) {
    const auto path = at("carts", i);
    if (!carts.insert(s.carts[i].cart_id).second) invalid(path + ".cart_id", "duplicate");
    if (!s.grid.is_open(s.carts[i].start)) invalid(path + ".start", "blocked or outside the grid");
  }

  std::set<LaneId> lanes;
  for (std::size_t i = 0; i < s.lanes.size(); ++i) {
    const auto path = at("lanes", i);
    if (!lanes.insert(s.lanes[i].lane_id).second) invalid(path + ".lane_id", "duplicate");
    for (std::size_t k = 0; k < s.lanes[i].queue.size(); ++k) {
      if (s.lanes[i].queue[k] == 0) invalid(at(path + ".queue", k), "item counts must be positive");
    }
  }

  std::set<CartId> shoppers;
  for (std::size_t i = 0; i < s.shoppers.size(); ++i) {
    const auto& sh = s.shoppers[i];
    const auto path = at("shoppers", i);
    if (!carts.contains(sh.cart_id)) invalid(path + ".cart_id", "no such cart");
    if (!shoppers.insert(sh.cart_id).second) invalid(path + ".cart_id", "cart already has a shopper");
    if (!(sh.speed > 0)) invalid(path + ".speed", "must be positive");
    if (sh.start_time < 0) invalid(path + ".start_time", "must not be negative");
    if (sh.dwell < 0) invalid(path + ".dwell", "must not be negative");
    for (std::size_t k = 0; k < sh.waypoints.size(); ++k) {
      if (!products.contains(sh.waypoints[k])) invalid(at(path + ".waypoints", k), "no such product");
    }
    if (sh.checkout) {
      if (!s.grid.is_open(*sh.checkout)) invalid(path + ".checkout", "blocked or outside the grid");
      if (s.lanes.empty()) invalid(path + ".checkout", "scenario has no lanes");
    }
    // Every leg of the trip must be walkable.
    Cell here = std::find_if(s.carts.begin(), s.carts.end(), [&](const CartSpec& c) {
                  return c.cart_id == sh.cart_id;
                })->start;
    std::vector<Cell> stops;
    for (ProductId product : sh.waypoints) {
      for (const auto& p : s.products) {
        if (p.product_id == product) stops.push_back(positioning::location_cell(p.location_id, s.grid, s.tags));
      }
    }
    if (sh.checkout) stops.push_back(*sh.checkout);
    for (const Cell& next : stops) {
      try {
        positioning::shortest_path(s.grid, here, next);
      } catch (const Error& e) {
        invalid(path, e.what());
      }
      here = next;
    }
  }

  std::set<std::string> food_ids;
  for (std::size_t i = 0; i < s.food_tags.size(); ++i) {
    const auto& f = s.food_tags[i];
    const auto path = at("food_tags", i);
    if (f.tag_id.empty()) invalid(path + ".tag_id", "must not be empty");
    if (!food_ids.insert(f.tag_id).second) invalid(path + ".tag_id", "duplicate");
    try {
      foodtrack::ManualRtc rtc(static_cast<foodtrack::UnixSeconds>(s.epoch));
      foodtrack::FoodTag probe(rtc, f.log_region_octets);
      probe.init(f.config);
    } catch (const Error& e) {
      invalid(path, e.what());
    }
    if (f.config.sample_interval_minutes == 0) {
      invalid(path + ".sample_interval_minutes", "must be positive");
    }
    if (f.profile.empty()) invalid(path + ".profile", "needs at least one segment");
    for (std::size_t k = 0; k < f.profile.size(); ++k) {
      const auto& seg = f.profile[k];
      const auto seg_path = at(path + ".profile", k);
      if (k > 0 && seg.time <= f.profile[k - 1].time) invalid(seg_path + ".time", "must increase");
      if (seg.temp_c < -40 || seg.temp_c > 125) invalid(seg_path + ".temp_c", "outside sensor range");
      if (seg.rh < 0 || seg.rh > 100) invalid(seg_path + ".rh", "outside 0..100");
    }
    if (f.plant_events.size() > foodtrack::kPlantEventCapacity) {
      invalid(path + ".plant_events", "more than the tag can hold");
    }
    for (std::size_t k = 1; k < f.plant_events.size(); ++k) {
      if (f.plant_events[k].time < f.plant_events[k - 1].time) {
        invalid(at(path + ".plant_events", k) + ".time", "must not decrease");
      }
    }
  }
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kValidation, "scenario: expected an object");
  Scenario s;
  s.seed = json_field_or<std::uint64_t>(j, "seed", s.seed);
  if (j.contains("epoch")) s.epoch = time_field(j, "epoch", "");
  s.duration = json_field_or<double>(j, "duration", s.duration);
  s.tick = json_field_or<double>(j, "tick", s.tick);
  s.window = json_field_or<double>(j, "window", s.window);
  s.read_range = json_field_or<double>(j, "read_range", s.read_range);
  s.sync_period = json_field_or<double>(j, "sync_period", s.sync_period);
  s.lane_service_rate = json_field_or<double>(j, "lane_service_rate", s.lane_service_rate);
  s.checkout_overhead = json_field_or<double>(j, "checkout_overhead", s.checkout_overhead);
  if (j.contains("radio")) {
    const auto& r = j.at("radio");
    s.rate_bps = json_field_or<double>(r, "rate_bps", s.rate_bps, "radio");
    s.overhead_bits = json_field_or<std::uint32_t>(r, "overhead_bits", s.overhead_bits, "radio");
  }
  if (j.contains("transmission")) {
    const auto& t = j.at("transmission");
    s.transmission.on_new_read =
        json_field_or<bool>(t, "on_new_read", s.transmission.on_new_read, "transmission");
    s.transmission.heartbeat =
        json_field_or<double>(t, "heartbeat", s.transmission.heartbeat, "transmission");
  }

  if (!j.contains("store")) invalid("store", "missing");
  const auto& st = j.at("store");
  s.store.store_id = json_field<cartlink::StoreId>(st, "store_id", "store");
  s.store.name = json_field_or<std::string>(st, "name", "", "store");
  s.store.lat = json_field_or<double>(st, "lat", 0.0, "store");
  s.store.lon = json_field_or<double>(st, "lon", 0.0, "store");

  if (!j.contains("grid")) invalid("grid", "missing");
  const auto& g = j.at("grid");
  std::set<Cell> blocked;
  const auto& blocked_json = array_field(g, "blocked", "grid");
  for (std::size_t i = 0; i < blocked_json.size(); ++i) {
    const auto& c = blocked_json[i];
    if (!c.is_array() || c.size() != 2 || !c[0].is_number_integer() || !c[1].is_number_integer()) {
      invalid(at("grid.blocked", i), "expected [x, y] integers");
    }
    blocked.insert({c[0].get<int>(), c[1].get<int>()});
  }
  try {
    s.grid = positioning::StoreGrid(json_field<int>(g, "width", "grid"),
                                    json_field<int>(g, "height", "grid"),
                                    json_field_or<double>(g, "cell_size", 1.0, "grid"),
                                    std::move(blocked));
  } catch (const Error& e) {
    if (std::string_view(e.what()).find("grid.") != std::string_view::npos) throw;
    invalid("grid", e.what());
  }

  s.tags = positioning::TagMap(s.store.store_id);
  const auto& tags = array_field(j, "tags", "");
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const auto path = at("tags", i);
    const auto id = json_field<std::string>(tags[i], "tag_id", path);
    const positioning::TagPlacement placement{
        json_field<LocationId>(tags[i], "location_id", path),
        {json_field<double>(tags[i], "x", path), json_field<double>(tags[i], "y", path)}};
    try {
      s.tags.add(id, placement);
    } catch (const Error& e) {
      invalid(path + ".tag_id", e.what());
    }
  }

  const auto& products = array_field(j, "products", "");
  for (std::size_t i = 0; i < products.size(); ++i) {
    const auto path = at("products", i);
    const auto& p = products[i];
    s.products.push_back({json_field<ProductId>(p, "product_id", path),
                          json_field_or<std::string>(p, "name", "", path),
                          json_field<LocationId>(p, "location_id", path),
                          json_field_or<std::uint32_t>(p, "count", 0, path)});
  }

  const auto& carts = array_field(j, "carts", "");
  for (std::size_t i = 0; i < carts.size(); ++i) {
    const auto path = at("carts", i);
    s.carts.push_back({json_field<CartId>(carts[i], "cart_id", path), cell_field(carts[i], "start", path)});
  }

  const auto& lanes = array_field(j, "lanes", "");
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    const auto path = at("lanes", i);
    s.lanes.push_back({json_field<LaneId>(lanes[i], "lane_id", path),
                       json_field_or<std::vector<std::uint32_t>>(lanes[i], "queue", {}, path)});
  }

  const auto& shoppers = array_field(j, "shoppers", "");
  for (std::size_t i = 0; i < shoppers.size(); ++i) {
    const auto path = at("shoppers", i);
    const auto& sh = shoppers[i];
    ShopperSpec spec;
    spec.cart_id = json_field<CartId>(sh, "cart_id", path);
    spec.waypoints = json_field_or<std::vector<ProductId>>(sh, "waypoints", {}, path);
    spec.speed = json_field_or<double>(sh, "speed", spec.speed, path);
    spec.start_time = json_field_or<double>(sh, "start_time", spec.start_time, path);
    spec.dwell = json_field_or<double>(sh, "dwell", spec.dwell, path);
    if (sh.contains("checkout") && !sh.at("checkout").is_null()) {
      spec.checkout = cell_field(sh, "checkout", path);
    }
    s.shoppers.push_back(std::move(spec));
  }

  const auto& foods = array_field(j, "food_tags", "");
  for (std::size_t i = 0; i < foods.size(); ++i) {
    const auto path = at("food_tags", i);
    const auto& f = foods[i];
    FoodTagSpec spec;
    spec.tag_id = json_field<std::string>(f, "tag_id", path);
    spec.config.password = json_field<std::string>(f, "password", path);
    spec.config.production_date = optional_date(f, "production_date", path);
    spec.config.expiry_date = optional_date(f, "expiry_date", path);
    if (f.contains("thresholds")) {
      const auto tp = path + ".thresholds";
      const auto& t = f.at("thresholds");
      spec.config.thresholds.temp_raw =
          json_field_or<std::uint16_t>(t, "temp_raw", spec.config.thresholds.temp_raw, tp);
      spec.config.thresholds.hum_raw =
          json_field_or<std::uint16_t>(t, "hum_raw", spec.config.thresholds.hum_raw, tp);
    }
    spec.config.sample_interval_minutes = json_field_or<std::uint16_t>(
        f, "sample_interval_minutes", spec.config.sample_interval_minutes, path);
    spec.log_region_octets =
        json_field_or<std::size_t>(f, "log_region_octets", spec.log_region_octets, path);
    const auto& profile = array_field(f, "profile", path);
    for (std::size_t k = 0; k < profile.size(); ++k) {
      const auto sp = at(path + ".profile", k);
      spec.profile.push_back({json_field<double>(profile[k], "time", sp),
                              json_field<double>(profile[k], "temp_c", sp),
                              json_field<double>(profile[k], "rh", sp)});
    }
    const auto& events = array_field(f, "plant_events", path);
    for (std::size_t k = 0; k < events.size(); ++k) {
      const auto ep = at(path + ".plant_events", k);
      PlantEventSpec e;
      e.time = json_field<double>(events[k], "time", ep);
      e.plant_id = json_field<std::uint16_t>(events[k], "plant_id", ep);
      try {
        e.kind = foodtrack::parse_plant_event_kind(json_field<std::string>(events[k], "kind", ep));
      } catch (const Error& err) {
        invalid(ep + ".kind", err.what());
      }
      spec.plant_events.push_back(e);
    }
    s.food_tags.push_back(std::move(spec));
  }

  validate(s);
  return s;
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["seed"] = s.seed;
  j["epoch"] = format_iso8601(s.epoch);
  j["duration"] = s.duration;
  j["tick"] = s.tick;
  j["window"] = s.window;
  j["read_range"] = s.read_range;
  j["radio"] = {{"rate_bps", s.rate_bps}, {"overhead_bits", s.overhead_bits}};
  j["transmission"] = {{"on_new_read", s.transmission.on_new_read},
                       {"heartbeat", s.transmission.heartbeat}};
  j["sync_period"] = s.sync_period;
  j["lane_service_rate"] = s.lane_service_rate;
  j["checkout_overhead"] = s.checkout_overhead;
  j["store"] = {{"store_id", s.store.store_id}, {"name", s.store.name},
                {"lat", s.store.lat}, {"lon", s.store.lon}};
  json blocked = json::array();
  for (const auto& c : s.grid.blocked()) blocked.push_back(cell_json(c));
  j["grid"] = {{"width", s.grid.width()}, {"height", s.grid.height()},
               {"cell_size", s.grid.cell_size()}, {"blocked", blocked}};
  json tags = json::array();
  for (const auto& [id, p] : s.tags.entries()) {
    tags.push_back({{"tag_id", id}, {"location_id", p.location_id}, {"x", p.position.x}, {"y", p.position.y}});
  }
  j["tags"] = tags;
  json products = json::array();
  for (const auto& p : s.products) {
    products.push_back({{"product_id", p.product_id}, {"name", p.name},
                        {"location_id", p.location_id}, {"count", p.count}});
  }
  j["products"] = products;
  json carts = json::array();
  for (const auto& c : s.carts) carts.push_back({{"cart_id", c.cart_id}, {"start", cell_json(c.start)}});
  j["carts"] = carts;
  json lanes = json::array();
  for (const auto& l : s.lanes) lanes.push_back({{"lane_id", l.lane_id}, {"queue", l.queue}});
  j["lanes"] = lanes;
  json shoppers = json::array();
  for (const auto& sh : s.shoppers) {
    json o = {{"cart_id", sh.cart_id}, {"waypoints", sh.waypoints}, {"speed", sh.speed},
              {"start_time", sh.start_time}, {"dwell", sh.dwell}};
    o["checkout"] = sh.checkout ? cell_json(*sh.checkout) : json();
    shoppers.push_back(o);
  }
  j["shoppers"] = shoppers;
  json foods = json::array();
  for (const auto& f : s.food_tags) {
    auto date = [](const std::optional<foodtrack::UnixSeconds>& d) {
      return d ? json(format_iso8601(*d)) : json();
    };
    json profile = json::array();
    for (const auto& seg : f.profile) {
      profile.push_back({{"time", seg.time}, {"temp_c", seg.temp_c}, {"rh", seg.rh}});
    }
    json events = json::array();
    for (const auto& e : f.plant_events) {
      events.push_back({{"time", e.time}, {"plant_id", e.plant_id}, {"kind", foodtrack::to_string(e.kind)}});
    }
    foods.push_back({{"tag_id", f.tag_id},
                     {"password", f.config.password},
                     {"production_date", date(f.config.production_date)},
                     {"expiry_date", date(f.config.expiry_date)},
                     {"thresholds", {{"temp_raw", f.config.thresholds.temp_raw},
                                     {"hum_raw", f.config.thresholds.hum_raw}}},
                     {"sample_interval_minutes", f.config.sample_interval_minutes},
                     {"log_region_octets", f.log_region_octets},
                     {"profile", profile},
                     {"plant_events", events}});
  }
  j["food_tags"] = foods;
  return j;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open scenario " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kValidation, path.string() + ": not valid JSON: " + e.what());
  }
  return scenario_from_json(j);
}

// Layout, 46 m x 24 m in 1 m cells:
//   y = 0       checkout row, one lane tag per lane
//   y = 1       front aisle
//   y = 4..5, 9..10, 14..15, 19..20   shelf rows, x = 3..20 and 25..42
//   y = 23      cart corral
// Floor tags sit on aisle cell centers beside the shelves, along the
// cross aisles and across the front of the store.
Scenario make_case_study_scenario(std::uint64_t seed) {
  constexpr int kWidth = 46;
  constexpr int kHeight = 24;
  constexpr std::size_t kTags = 230;
  constexpr int kCarts = 150;
  constexpr int kLanes = 6;
  constexpr int kProducts = 120;

  Scenario s;
  s.seed = seed;
  s.epoch = parse_iso8601("2024-03-01T09:00:00Z");
  s.duration = 3600.0;
  s.store = {1, "Campus Market", 29.7174, -95.4018};

  std::set<Cell> blocked;
  for (int row = 0; row < 4; ++row) {
    for (int dy = 0; dy < 2; ++dy) {
      for (int x = 3; x <= 42; ++x) {
        if (x > 20 && x < 25) continue;
        blocked.insert({x, 4 + 5 * row + dy});
      }
    }
  }
  s.grid = positioning::StoreGrid(kWidth, kHeight, 1.0, blocked);

  std::vector<Cell> candidates;
  std::vector<Cell> lane_cells;
  for (int k = 0; k < kLanes; ++k) lane_cells.push_back({8 + 6 * k, 0});
  candidates.insert(candidates.end(), lane_cells.begin(), lane_cells.end());
  for (int row = 0; row < 4; ++row) {
    for (int y : {3 + 5 * row, 6 + 5 * row}) {
      for (int x = 3; x <= 41; x += 2) {
        if (x > 20 && x < 25) continue;
        candidates.push_back({x, y});
      }
    }
  }
  for (int x : {1, 22, 44}) {
    for (int y = 2; y <= 22; y += 2) candidates.push_back({x, y});
  }
  for (int x = 0; x < kWidth; ++x) candidates.push_back({x, 1});
  for (int y : {7, 12, 17}) candidates.push_back({23, y});
  std::vector<Cell> front;  // checkout parking cells
  s.tags = positioning::TagMap(s.store.store_id);
  std::set<Cell> used;
  for (const auto& c : candidates) {
    if (s.tags.size() == kTags) break;
    if (!used.insert(c).second) continue;
    const auto id = wiegand::payload_to_tag_id(0x100000u + static_cast<std::uint32_t>(s.tags.size()) * 0x97u);
    s.tags.add(id, {static_cast<LocationId>(s.tags.size() + 1), s.grid.center_of(c)});
    if (c.y == 1) front.push_back(c);
  }

  std::mt19937_64 rng(seed);
  auto pick = [&rng](std::size_t n) { return static_cast<std::size_t>(cartlink::uniform01(rng) * n); };
  auto between = [&rng](double lo, double hi) { return lo + (hi - lo) * cartlink::uniform01(rng); };

  // Products live at the shelf-side tags.
  std::vector<LocationId> shelf_locations;
  for (const auto& [id, p] : s.tags.entries()) {
    const auto c = s.grid.cell_of(p.position);
    if (c.y >= 3 && c.y <= 21 && c.x >= 3 && c.x <= 41) shelf_locations.push_back(p.location_id);
  }
  std::sort(shelf_locations.begin(), shelf_locations.end());
  for (int i = 0; i < kProducts; ++i) {
    s.products.push_back({static_cast<ProductId>(1000 + i), "product-" + std::to_string(1000 + i),
                          shelf_locations[pick(shelf_locations.size())],
                          static_cast<std::uint32_t>(pick(40))});
  }

  for (int k = 0; k < kLanes; ++k) {
    LaneSpec lane{static_cast<LaneId>(k + 1), {}};
    const auto waiting = pick(4);
    for (std::size_t q = 0; q < waiting; ++q) lane.queue.push_back(static_cast<std::uint32_t>(1 + pick(20)));
    s.lanes.push_back(lane);
  }

  for (int i = 0; i < kCarts; ++i) {
    const auto cart = static_cast<CartId>(i + 1);
    s.carts.push_back({cart, {static_cast<int>(pick(kWidth)), kHeight - 1}});
    ShopperSpec shopper;
    shopper.cart_id = cart;
    const auto stops = 3 + pick(6);
    for (std::size_t k = 0; k < stops; ++k) {
      shopper.waypoints.push_back(s.products[pick(s.products.size())].product_id);
    }
    shopper.speed = between(0.6, 1.2);
    shopper.start_time = std::floor(between(0.0, 1800.0) * 10.0) / 10.0;
    shopper.dwell = std::floor(between(5.0, 30.0));
    shopper.checkout = front[pick(front.size())];
    s.shoppers.push_back(std::move(shopper));
  }

  // Chilled goods: one steady, the rest with excursions of varying size.
  const double excursions[] = {0.0, 3.0, 8.0, 15.0, 25.0};
  for (int i = 0; i < 5; ++i) {
    FoodTagSpec f;
    f.tag_id = "FT-" + std::to_string(i + 1);
    f.config.password = "cold-chain-secret-0" + std::to_string(i);
    f.config.production_date = static_cast<foodtrack::UnixSeconds>(s.epoch - 86400 * (i + 1));
    f.config.sample_interval_minutes = 1;
    f.profile = {{0.0, 4.0, 85.0},
                 {600.0 + 300.0 * i, 4.0 + excursions[i], 70.0},
                 {1500.0 + 300.0 * i, 5.0, 80.0},
                 {3000.0, 3.5, 88.0}};
    f.plant_events = {{0.0, static_cast<std::uint16_t>(10 + i), foodtrack::PlantEventKind::kArrival},
                      {1800.0, static_cast<std::uint16_t>(10 + i), foodtrack::PlantEventKind::kDeparture},
                      {2400.0, 1, foodtrack::PlantEventKind::kArrival}};
    s.food_tags.push_back(std::move(f));
  }

  validate(s);
  return s;
}

}  // namespace sysmart::sim
