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

#include "sysmart/json_codec.hpp"

#include "sysmart/timefmt.hpp"

namespace sysmart {

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

std::vector<std::uint8_t> from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2) throw Error(ErrorCode::kFormat, "hex string has odd length");
  std::vector<std::uint8_t> out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const int hi = nibble(hex[i]);
    const int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) throw Error(ErrorCode::kFormat, "invalid hex digit");
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

}  // namespace sysmart

namespace sysmart::backend {
namespace {

std::int64_t time_field(const json& j, std::string_view key) {
  const auto text = json_field<std::string>(j, key);
  try {
    return parse_iso8601(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::kValidation, std::string(key) + ": " + e.what());
  }
}

}  // namespace

void to_json(json& j, const StoreRecord& r) {
  j = {{"store_id", r.store_id},
       {"name", r.name},
       {"lat", r.lat},
       {"lon", r.lon},
       {"traffic_status", to_string(r.traffic_status)},
       {"parking_status", r.parking_status}};
}

void from_json(const json& j, StoreRecord& r) {
  r.store_id = json_field<StoreId>(j, "store_id");
  r.name = json_field_or<std::string>(j, "name", "");
  r.lat = json_field<double>(j, "lat");
  r.lon = json_field<double>(j, "lon");
  r.traffic_status = parse_traffic_status(json_field_or<std::string>(j, "traffic_status", "Low"));
  r.parking_status = json_field_or<std::uint32_t>(j, "parking_status", 0);
}

void to_json(json& j, const ProductRecord& r) {
  j = {{"product_id", r.product_id}, {"name", r.name}};
}

void from_json(const json& j, ProductRecord& r) {
  r.product_id = json_field<ProductId>(j, "product_id");
  r.name = json_field_or<std::string>(j, "name", "");
}

void to_json(json& j, const LocationRecord& r) {
  j = {{"location_id", r.location_id}, {"store_id", r.store_id}, {"label", r.label},
       {"x", r.x}, {"y", r.y}};
}

void from_json(const json& j, LocationRecord& r) {
  r.location_id = json_field<LocationId>(j, "location_id");
  r.store_id = json_field<StoreId>(j, "store_id");
  r.label = json_field_or<std::string>(j, "label", "");
  r.x = json_field<double>(j, "x");
  r.y = json_field<double>(j, "y");
}

void to_json(json& j, const InventoryRecord& r) {
  j = {{"store_id", r.store_id},
       {"product_id", r.product_id},
       {"count", r.count},
       {"product_location", r.product_location},
       {"updated_at", format_iso8601(r.updated_at)}};
}

void from_json(const json& j, InventoryRecord& r) {
  r.store_id = json_field<StoreId>(j, "store_id");
  r.product_id = json_field<ProductId>(j, "product_id");
  r.count = json_field<std::uint32_t>(j, "count");
  r.product_location = json_field<LocationId>(j, "product_location");
  r.updated_at = time_field(j, "updated_at");
}

void to_json(json& j, const CartLocationRecord& r) {
  j = {{"store_id", r.store_id},
       {"cart_id", r.cart_id},
       {"cart_location", r.cart_location},
       {"updated_at", format_iso8601(r.updated_at)}};
}

void from_json(const json& j, CartLocationRecord& r) {
  r.store_id = json_field<StoreId>(j, "store_id");
  r.cart_id = json_field<CartId>(j, "cart_id");
  r.cart_location = json_field<LocationId>(j, "cart_location");
  r.updated_at = time_field(j, "updated_at");
}

void to_json(json& j, const MappingRecord& r) {
  j = {{"store_id", r.store_id}, {"tag_id", r.tag_id}, {"location_id", r.location_id},
       {"x", r.x}, {"y", r.y}};
}

void from_json(const json& j, MappingRecord& r) {
  r.store_id = json_field<StoreId>(j, "store_id");
  r.tag_id = json_field<std::string>(j, "tag_id");
  r.location_id = json_field<LocationId>(j, "location_id");
  r.x = json_field<double>(j, "x");
  r.y = json_field<double>(j, "y");
}

void to_json(json& j, const LaneRecord& r) {
  j = {{"store_id", r.store_id}, {"lane_id", r.lane_id}, {"queue", r.queue}};
}

void from_json(const json& j, LaneRecord& r) {
  r.store_id = json_field<StoreId>(j, "store_id");
  r.lane_id = json_field<LaneId>(j, "lane_id");
  r.queue = json_field_or<std::vector<std::uint32_t>>(j, "queue", {});
}

void to_json(json& j, const Ticket& r) {
  j = {{"id", r.id},
       {"kind", to_string(r.kind)},
       {"store_id", r.store_id},
       {"cart_id", r.cart_id},
       {"created_at", format_iso8601(r.created_at)},
       {"status", to_string(r.status)},
       {"updated_at", format_iso8601(r.updated_at)}};
}

void from_json(const json& j, Ticket& r) {
  r.id = json_field<TicketId>(j, "id");
  r.kind = parse_ticket_kind(json_field<std::string>(j, "kind"));
  r.store_id = json_field<StoreId>(j, "store_id");
  r.cart_id = json_field<CartId>(j, "cart_id");
  r.created_at = time_field(j, "created_at");
  r.status = parse_ticket_status(json_field<std::string>(j, "status"));
  r.updated_at = time_field(j, "updated_at");
}

void to_json(json& j, const FoodTagRecord& r) {
  j = {{"tag_id", r.tag_id}, {"dump_hex", to_hex(r.dump)}};
}

void from_json(const json& j, FoodTagRecord& r) {
  r.tag_id = json_field<std::string>(j, "tag_id");
  r.dump = from_hex(json_field<std::string>(j, "dump_hex"));
}

void to_json(json& j, const ItemLocation& r) {
  j = {{"count", r.count}, {"location_id", r.location_id}};
}

void to_json(json& j, const BranchOption& r) {
  j = {{"store_id", r.store_id}, {"count", r.count}, {"distance_km", r.distance_km}};
}

void to_json(json& j, const Snapshot& r) {
  j = {{"source_store_id", r.source_store_id}, {"carts", r.carts}, {"inventory", r.inventory}};
}

void from_json(const json& j, Snapshot& r) {
  r.source_store_id = json_field<StoreId>(j, "source_store_id");
  r.carts = json_field_or<std::vector<CartLocationRecord>>(j, "carts", {});
  r.inventory = json_field_or<std::vector<InventoryRecord>>(j, "inventory", {});
}

}  // namespace sysmart::backend

namespace sysmart::foodtrack {

nlohmann::json summary_to_json(const TagSummary& s) {
  auto opt_time = [](auto v) -> nlohmann::json {
    return v ? nlohmann::json(format_iso8601(static_cast<std::int64_t>(*v))) : nlohmann::json();
  };
  auto opt_num = [](const std::optional<double>& v) -> nlohmann::json {
    return v ? nlohmann::json(*v) : nlohmann::json();
  };
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : s.plant_events) {
    events.push_back({{"plant_id", e.plant_id},
                      {"kind", to_string(e.kind)},
                      {"timestamp", format_iso8601(e.timestamp)}});
  }
  return {{"production_date", opt_time(s.production_date)},
          {"expiry_date", opt_time(s.expiry_date)},
          {"max_temp_c", opt_num(s.max_temp_c)},
          {"avg_temp_c", opt_num(s.avg_temp_c)},
          {"estimated_expiry", opt_time(s.estimated_expiry)},
          {"plant_events", events},
          {"log_count", s.log_count},
          {"overflow", s.overflow}};
}

nlohmann::json log_to_json(const FoodTag& tag) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : tag.log()) {
    records.push_back({{"timestamp", format_iso8601(tag.record_time(r))},
                       {"minutes_since_first", r.minutes_since_first},
                       {"temp_raw", r.temp_raw},
                       {"hum_raw", r.hum_raw},
                       {"temp_c", raw_to_celsius(r.temp_raw)},
                       {"rh_percent", raw_to_rh(r.hum_raw)}});
  }
  return {{"count", tag.log_count()}, {"overflow", tag.overflow()}, {"records", records}};
}

}  // namespace sysmart::foodtrack
