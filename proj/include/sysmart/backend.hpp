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

// Store database shared by the Local (per-branch) and Main (all branches)
// servers. Table and field names follow the deployed schema: store,
// product, location, inventory, cart_location and mapping, plus lanes and
// service tickets.
//
// StoreDatabase is a plain value type with no internal locking; Service
// (service.hpp) wraps it with the single-writer / snapshot-reader model.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sysmart/cartlink.hpp"
#include "sysmart/error.hpp"
#include "sysmart/positioning.hpp"

namespace sysmart::backend {

using cartlink::CartId;
using cartlink::StoreId;
using positioning::LocationId;
using ProductId = std::uint32_t;
using LaneId = std::uint32_t;
using TicketId = std::uint64_t;
using UnixTime = std::int64_t;

enum class TrafficStatus { kLow, kMedium, kHigh };

struct StoreRecord {
  StoreId store_id = 0;
  std::string name;
  double lat = 0.0;
  double lon = 0.0;
  TrafficStatus traffic_status = TrafficStatus::kLow;
  std::uint32_t parking_status = 0;  // free spaces

  friend bool operator==(const StoreRecord&, const StoreRecord&) = default;
};

struct ProductRecord {
  ProductId product_id = 0;
  std::string name;

  friend bool operator==(const ProductRecord&, const ProductRecord&) = default;
};

struct LocationRecord {
  LocationId location_id = 0;
  StoreId store_id = 0;
  std::string label;
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const LocationRecord&, const LocationRecord&) = default;
};

struct InventoryRecord {
  StoreId store_id = 0;
  ProductId product_id = 0;
  std::uint32_t count = 0;
  LocationId product_location = 0;
  UnixTime updated_at = 0;

  friend bool operator==(const InventoryRecord&, const InventoryRecord&) = default;
};

struct CartLocationRecord {
  StoreId store_id = 0;
  CartId cart_id = 0;
  LocationId cart_location = 0;
  UnixTime updated_at = 0;

  friend bool operator==(const CartLocationRecord&, const CartLocationRecord&) = default;
};

/// Floor tag -> location row of the mapping table.
struct MappingRecord {
  StoreId store_id = 0;
  std::string tag_id;
  LocationId location_id = 0;
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const MappingRecord&, const MappingRecord&) = default;
};

struct LaneRecord {
  StoreId store_id = 0;
  LaneId lane_id = 0;
  std::vector<std::uint32_t> queue;  // item count per waiting customer

  friend bool operator==(const LaneRecord&, const LaneRecord&) = default;
};

enum class TicketKind { kAssistance, kMalfunction };
enum class TicketStatus { kOpen, kAcknowledged, kResolved };

/// An assistance request or a malfunction report.
struct Ticket {
  TicketId id = 0;
  TicketKind kind = TicketKind::kAssistance;
  StoreId store_id = 0;
  CartId cart_id = 0;
  UnixTime created_at = 0;
  TicketStatus status = TicketStatus::kOpen;
  UnixTime updated_at = 0;

  friend bool operator==(const Ticket&, const Ticket&) = default;
};

struct FoodTagRecord {
  std::string tag_id;
  std::vector<std::uint8_t> dump;

  friend bool operator==(const FoodTagRecord&, const FoodTagRecord&) = default;
};

struct ItemLocation {
  std::uint32_t count = 0;
  LocationId location_id = 0;

  friend bool operator==(const ItemLocation&, const ItemLocation&) = default;
};

struct BranchOption {
  StoreId store_id = 0;
  std::uint32_t count = 0;
  double distance_km = 0.0;

  friend bool operator==(const BranchOption&, const BranchOption&) = default;
};

/// Local -> Main push payload.
struct Snapshot {
  StoreId source_store_id = 0;
  std::vector<CartLocationRecord> carts;
  std::vector<InventoryRecord> inventory;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

/// One journaled upsert: {"table": name, "record": {...}}.
using Change = nlohmann::json;
using ChangeSink = std::function<void(const Change&)>;

std::string_view to_string(TrafficStatus s);
std::string_view to_string(TicketKind k);
std::string_view to_string(TicketStatus s);
TrafficStatus parse_traffic_status(std::string_view text);
TicketKind parse_ticket_kind(std::string_view text);
TicketStatus parse_ticket_status(std::string_view text);

/// Great-circle distance on a spherical earth (mean radius 6371.0088 km).
double great_circle_km(double lat1, double lon1, double lat2, double lon2);

class StoreDatabase {
 public:
  StoreDatabase() = default;

  /// Receives every applied upsert; used for journaling.
  void set_change_sink(ChangeSink sink) { sink_ = std::move(sink); }

  /// Per-customer checkout overhead, in item equivalents (default 0).
  void set_checkout_overhead(double items) { checkout_overhead_ = items; }
  double checkout_overhead() const { return checkout_overhead_; }

  // ---- table maintenance ----
  void upsert_store(const StoreRecord& r);
  void upsert_product(const ProductRecord& r);
  void upsert_location(const LocationRecord& r);
  /// Requires a known store and product.
  void upsert_inventory(const InventoryRecord& r);
  /// Requires a known store.
  void register_cart(StoreId store, CartId cart);
  /// Requires a known store; the tag id must be new for that store.
  void upsert_mapping(const MappingRecord& r);
  void upsert_lane(const LaneRecord& r);
  void upsert_foodtag(const FoodTagRecord& r);

  /// Replays one change produced by a sink.
  void apply(const Change& change);

  // ---- operations ----
  CartLocationRecord ingest_position(const cartlink::CartPositionPacket& packet, UnixTime now);
  ItemLocation find_item(StoreId store, ProductId product) const;
  std::vector<BranchOption> alternative_branches(ProductId product, StoreId origin) const;
  LaneId fastest_lane(StoreId store, int my_item_count) const;
  void join_lane(StoreId store, LaneId lane, std::uint32_t items);
  /// Removes the front customer; returns their item count.
  std::optional<std::uint32_t> serve_lane(StoreId store, LaneId lane);

  Ticket open_ticket(TicketKind kind, StoreId store, CartId cart, UnixTime now);
  Ticket acknowledge(TicketKind kind, TicketId id, UnixTime now);
  Ticket resolve(TicketKind kind, TicketId id, UnixTime now);

  Snapshot snapshot(StoreId store) const;
  /// Last-write-wins merge by updated_at, ties to the incoming record.
  /// Returns the number of records that changed.
  std::size_t sync_push(const Snapshot& snapshot);

  // ---- queries ----
  bool has_store(StoreId store) const { return stores_.contains(store); }
  bool has_cart(StoreId store, CartId cart) const { return carts_.contains({store, cart}); }
  const StoreRecord& store(StoreId store) const;
  const std::map<StoreId, StoreRecord>& stores() const { return stores_; }
  const std::map<ProductId, ProductRecord>& products() const { return products_; }
  std::vector<CartLocationRecord> cart_locations(StoreId store) const;
  std::optional<CartLocationRecord> cart_location(StoreId store, CartId cart) const;
  std::vector<LaneRecord> lanes(StoreId store) const;
  std::vector<LocationRecord> locations(StoreId store) const;
  std::vector<InventoryRecord> inventory(StoreId store) const;
  std::vector<Ticket> tickets(StoreId store, TicketKind kind,
                              std::optional<TicketStatus> status = std::nullopt) const;
  const Ticket& ticket(TicketKind kind, TicketId id) const;
  const positioning::TagMap& tag_map(StoreId store) const;
  const FoodTagRecord& foodtag(const std::string& tag_id) const;
  std::vector<std::string> foodtag_ids() const;

  /// Changes that rebuild this database from empty when replayed.
  std::vector<Change> changes() const;

  /// Compares table contents; the sink and overhead setting are ignored.
  bool same_contents(const StoreDatabase& other) const;

 private:
  void emit(std::string_view table, nlohmann::json record);
  void require_store(StoreId store) const;
  void put_ticket(const Ticket& t);

  ChangeSink sink_;
  double checkout_overhead_ = 0.0;

  std::map<StoreId, StoreRecord> stores_;
  std::map<ProductId, ProductRecord> products_;
  std::map<std::pair<StoreId, LocationId>, LocationRecord> locations_;
  std::map<std::pair<StoreId, ProductId>, InventoryRecord> inventory_;
  std::set<std::pair<StoreId, CartId>> carts_;
  std::map<std::pair<StoreId, CartId>, CartLocationRecord> cart_locations_;
  std::map<StoreId, positioning::TagMap> mappings_;
  std::map<std::pair<StoreId, LaneId>, LaneRecord> lanes_;
  std::map<TicketId, Ticket> tickets_;
  std::map<std::string, FoodTagRecord> foodtags_;
  TicketId next_ticket_id_ = 1;
};

}  // namespace sysmart::backend
