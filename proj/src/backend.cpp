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

#include "sysmart/backend.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sysmart/json_codec.hpp"
#include "sysmart/wiegand.hpp"

namespace sysmart::backend {

std::string_view to_string(TrafficStatus s) {
  switch (s) {
    case TrafficStatus::kLow: return "Low";
    case TrafficStatus::kMedium: return "Medium";
    case TrafficStatus::kHigh: return "High";
  }
  return "Low";
}

std::string_view to_string(TicketKind k) {
  return k == TicketKind::kAssistance ? "assistance" : "malfunction";
}

std::string_view to_string(TicketStatus s) {
  switch (s) {
    case TicketStatus::kOpen: return "Open";
    case TicketStatus::kAcknowledged: return "Acknowledged";
    case TicketStatus::kResolved: return "Resolved";
  }
  return "Open";
}

TrafficStatus parse_traffic_status(std::string_view text) {
  if (text == "Low") return TrafficStatus::kLow;
  if (text == "Medium") return TrafficStatus::kMedium;
  if (text == "High") return TrafficStatus::kHigh;
  throw Error(ErrorCode::kValidation, "traffic_status must be Low, Medium or High");
}

TicketKind parse_ticket_kind(std::string_view text) {
  if (text == "assistance") return TicketKind::kAssistance;
  if (text == "malfunction") return TicketKind::kMalfunction;
  throw Error(ErrorCode::kValidation, "ticket kind must be assistance or malfunction");
}

TicketStatus parse_ticket_status(std::string_view text) {
  if (text == "Open") return TicketStatus::kOpen;
  if (text == "Acknowledged") return TicketStatus::kAcknowledged;
  if (text == "Resolved") return TicketStatus::kResolved;
  throw Error(ErrorCode::kValidation, "status must be Open, Acknowledged or Resolved");
}

double great_circle_km(double lat1, double lon1, double lat2, double lon2) {
  constexpr double kEarthRadiusKm = 6371.0088;
  constexpr double kRad = std::numbers::pi / 180.0;
  const double dlat = (lat2 - lat1) * kRad;
  const double dlon = (lon2 - lon1) * kRad;
  const double a = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(lat1 * kRad) * std::cos(lat2 * kRad) * std::sin(dlon / 2) *
                       std::sin(dlon / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

void StoreDatabase::emit(std::string_view table, nlohmann::json record) {
  if (sink_) sink_(Change{{"table", table}, {"record", std::move(record)}});
}

void StoreDatabase::require_store(StoreId store) const {
  if (!stores_.contains(store)) {
    throw Error(ErrorCode::kReference, "unknown store " + std::to_string(store));
  }
}

const StoreRecord& StoreDatabase::store(StoreId store) const {
  require_store(store);
  return stores_.at(store);
}

void StoreDatabase::upsert_store(const StoreRecord& r) {
  stores_[r.store_id] = r;
  mappings_.try_emplace(r.store_id, positioning::TagMap(r.store_id));
  emit("store", r);
}

void StoreDatabase::upsert_product(const ProductRecord& r) {
  products_[r.product_id] = r;
  emit("product", r);
}

void StoreDatabase::upsert_location(const LocationRecord& r) {
  require_store(r.store_id);
  locations_[{r.store_id, r.location_id}] = r;
  emit("location", r);
}

void StoreDatabase::upsert_inventory(const InventoryRecord& r) {
  require_store(r.store_id);
  if (!products_.contains(r.product_id)) {
    throw Error(ErrorCode::kReference, "unknown product " + std::to_string(r.product_id));
  }
  inventory_[{r.store_id, r.product_id}] = r;
  emit("inventory", r);
}

void StoreDatabase::register_cart(StoreId store, CartId cart) {
  require_store(store);
  if (carts_.insert({store, cart}).second) {
    emit("cart", {{"store_id", store}, {"cart_id", cart}});
  }
}

void StoreDatabase::upsert_mapping(const MappingRecord& r) {
  require_store(r.store_id);
  auto& map = mappings_.at(r.store_id);
  const auto* existing = map.find(r.tag_id);
  if (existing) {
    if (existing->location_id == r.location_id && existing->position == positioning::Point{r.x, r.y}) {
      return;
    }
    throw Error(ErrorCode::kValidation, "tag " + r.tag_id + " is already mapped");
  }
  map.add(r.tag_id, {r.location_id, {r.x, r.y}});
  emit("mapping", r);
}

void StoreDatabase::upsert_lane(const LaneRecord& r) {
  require_store(r.store_id);
  if (std::any_of(r.queue.begin(), r.queue.end(), [](auto n) { return n == 0; })) {
    throw Error(ErrorCode::kValidation, "queued item counts must be positive");
  }
  lanes_[{r.store_id, r.lane_id}] = r;
  emit("lane", r);
}

void StoreDatabase::upsert_foodtag(const FoodTagRecord& r) {
  if (r.tag_id.empty()) throw Error(ErrorCode::kValidation, "food tag id must not be empty");
  foodtags_[r.tag_id] = r;
  emit("foodtag", r);
}

void StoreDatabase::put_ticket(const Ticket& t) {
  tickets_[t.id] = t;
  next_ticket_id_ = std::max(next_ticket_id_, t.id + 1);
  emit("ticket", t);
}

void StoreDatabase::apply(const Change& change) {
  const auto table = json_field<std::string>(change, "table");
  if (!change.contains("record")) throw Error(ErrorCode::kValidation, "change without record");
  const auto& rec = change.at("record");
  if (table == "store") {
    upsert_store(rec.get<StoreRecord>());
  } else if (table == "product") {
    upsert_product(rec.get<ProductRecord>());
  } else if (table == "location") {
    upsert_location(rec.get<LocationRecord>());
  } else if (table == "inventory") {
    upsert_inventory(rec.get<InventoryRecord>());
  } else if (table == "cart") {
    register_cart(json_field<StoreId>(rec, "store_id"), json_field<CartId>(rec, "cart_id"));
  } else if (table == "cart_location") {
    const auto r = rec.get<CartLocationRecord>();
    register_cart(r.store_id, r.cart_id);
    cart_locations_[{r.store_id, r.cart_id}] = r;
    emit("cart_location", r);
  } else if (table == "mapping") {
    upsert_mapping(rec.get<MappingRecord>());
  } else if (table == "lane") {
    upsert_lane(rec.get<LaneRecord>());
  } else if (table == "ticket") {
    put_ticket(rec.get<Ticket>());
  } else if (table == "foodtag") {
    upsert_foodtag(rec.get<FoodTagRecord>());
  } else {
    throw Error(ErrorCode::kValidation, "unknown table '" + table + "'");
  }
}

CartLocationRecord StoreDatabase::ingest_position(const cartlink::CartPositionPacket& packet,
                                                  UnixTime now) {
  require_store(packet.store_id);
  if (!has_cart(packet.store_id, packet.cart_id)) {
    throw Error(ErrorCode::kReference, "unknown cart " + std::to_string(packet.cart_id) +
                                           " in store " + std::to_string(packet.store_id));
  }
  const LocationId location = positioning::resolve_location(packet.tag_id, tag_map(packet.store_id));
  const std::pair key{packet.store_id, packet.cart_id};
  // Rows only move forward in time; a late packet is dropped.
  if (auto it = cart_locations_.find(key); it != cart_locations_.end() && it->second.updated_at > now) {
    return it->second;
  }
  auto& row = cart_locations_[key];
  row = CartLocationRecord{packet.store_id, packet.cart_id, location, now};
  emit("cart_location", row);
  return row;
}

ItemLocation StoreDatabase::find_item(StoreId store, ProductId product) const {
  require_store(store);
  if (!products_.contains(product)) {
    throw Error(ErrorCode::kReference, "unknown product " + std::to_string(product));
  }
  auto it = inventory_.find({store, product});
  if (it == inventory_.end()) {
    throw Error(ErrorCode::kReference, "product " + std::to_string(product) +
                                           " is not carried by store " + std::to_string(store));
  }
  return {it->second.count, it->second.product_location};
}

std::vector<BranchOption> StoreDatabase::alternative_branches(ProductId product,
                                                              StoreId origin) const {
  require_store(origin);
  if (!products_.contains(product)) {
    throw Error(ErrorCode::kReference, "unknown product " + std::to_string(product));
  }
  const auto& from = stores_.at(origin);
  std::vector<BranchOption> out;
  for (const auto& [key, row] : inventory_) {
    if (key.second != product || key.first == origin || row.count == 0) continue;
    const auto& s = stores_.at(key.first);
    out.push_back({key.first, row.count, great_circle_km(from.lat, from.lon, s.lat, s.lon)});
  }
  std::sort(out.begin(), out.end(), [](const BranchOption& a, const BranchOption& b) {
    return a.distance_km != b.distance_km ? a.distance_km < b.distance_km : a.store_id < b.store_id;
  });
  return out;
}

LaneId StoreDatabase::fastest_lane(StoreId store, int my_item_count) const {
  require_store(store);
  if (my_item_count <= 0) throw Error(ErrorCode::kArgument, "item count must be positive");
  std::optional<LaneId> best;
  double best_cost = 0.0;
  for (auto it = lanes_.lower_bound({store, 0}); it != lanes_.end() && it->first.first == store; ++it) {
    const auto& q = it->second.queue;
    double cost = checkout_overhead_ * static_cast<double>(q.size());
    for (auto n : q) cost += n;
    // Lanes iterate in ascending id, so strict < keeps the lowest id on ties.
    if (!best || cost < best_cost) {
      best = it->first.second;
      best_cost = cost;
    }
  }
  if (!best) throw Error(ErrorCode::kState, "store " + std::to_string(store) + " has no lanes");
  return *best;
}

void StoreDatabase::join_lane(StoreId store, LaneId lane, std::uint32_t items) {
  require_store(store);
  auto it = lanes_.find({store, lane});
  if (it == lanes_.end()) throw Error(ErrorCode::kReference, "unknown lane " + std::to_string(lane));
  if (items == 0) throw Error(ErrorCode::kArgument, "item count must be positive");
  it->second.queue.push_back(items);
  emit("lane", it->second);
}

std::optional<std::uint32_t> StoreDatabase::serve_lane(StoreId store, LaneId lane) {
  auto it = lanes_.find({store, lane});
  if (it == lanes_.end()) throw Error(ErrorCode::kReference, "unknown lane " + std::to_string(lane));
  auto& q = it->second.queue;
  if (q.empty()) return std::nullopt;
  const auto front = q.front();
  q.erase(q.begin());
  emit("lane", it->second);
  return front;
}

Ticket StoreDatabase::open_ticket(TicketKind kind, StoreId store, CartId cart, UnixTime now) {
  require_store(store);
  if (!has_cart(store, cart)) {
    throw Error(ErrorCode::kReference, "unknown cart " + std::to_string(cart));
  }
  Ticket t{next_ticket_id_, kind, store, cart, now, TicketStatus::kOpen, now};
  put_ticket(t);
  return t;
}

const Ticket& StoreDatabase::ticket(TicketKind kind, TicketId id) const {
  auto it = tickets_.find(id);
  if (it == tickets_.end() || it->second.kind != kind) {
    throw Error(ErrorCode::kReference,
                "unknown " + std::string(to_string(kind)) + " ticket " + std::to_string(id));
  }
  return it->second;
}

Ticket StoreDatabase::acknowledge(TicketKind kind, TicketId id, UnixTime now) {
  Ticket t = ticket(kind, id);
  if (t.status != TicketStatus::kOpen) {
    throw Error(ErrorCode::kTransition, "cannot acknowledge a ticket that is " +
                                            std::string(to_string(t.status)));
  }
  t.status = TicketStatus::kAcknowledged;
  t.updated_at = now;
  put_ticket(t);
  return t;
}

Ticket StoreDatabase::resolve(TicketKind kind, TicketId id, UnixTime now) {
  Ticket t = ticket(kind, id);
  if (t.status != TicketStatus::kAcknowledged) {
    throw Error(ErrorCode::kTransition,
                "cannot resolve a ticket that is " + std::string(to_string(t.status)));
  }
  t.status = TicketStatus::kResolved;
  t.updated_at = now;
  put_ticket(t);
  return t;
}

Snapshot StoreDatabase::snapshot(StoreId store) const {
  require_store(store);
  Snapshot s;
  s.source_store_id = store;
  s.carts = cart_locations(store);
  s.inventory = inventory(store);
  return s;
}

std::size_t StoreDatabase::sync_push(const Snapshot& snapshot) {
  require_store(snapshot.source_store_id);
  for (const auto& r : snapshot.carts) {
    if (r.store_id != snapshot.source_store_id) {
      throw Error(ErrorCode::kValidation, "snapshot cart row belongs to another store");
    }
  }
  for (const auto& r : snapshot.inventory) {
    if (r.store_id != snapshot.source_store_id) {
      throw Error(ErrorCode::kValidation, "snapshot inventory row belongs to another store");
    }
    if (!products_.contains(r.product_id)) {
      throw Error(ErrorCode::kReference, "unknown product " + std::to_string(r.product_id));
    }
  }

  std::size_t changed = 0;
  for (const auto& r : snapshot.carts) {
    register_cart(r.store_id, r.cart_id);
    auto it = cart_locations_.find({r.store_id, r.cart_id});
    if (it != cart_locations_.end() && (it->second.updated_at > r.updated_at || it->second == r)) {
      continue;
    }
    cart_locations_[{r.store_id, r.cart_id}] = r;
    emit("cart_location", r);
    ++changed;
  }
  for (const auto& r : snapshot.inventory) {
    auto it = inventory_.find({r.store_id, r.product_id});
    if (it != inventory_.end() && (it->second.updated_at > r.updated_at || it->second == r)) {
      continue;
    }
    inventory_[{r.store_id, r.product_id}] = r;
    emit("inventory", r);
    ++changed;
  }
  return changed;
}

std::vector<CartLocationRecord> StoreDatabase::cart_locations(StoreId store) const {
  require_store(store);
  std::vector<CartLocationRecord> out;
  for (auto it = cart_locations_.lower_bound({store, 0});
       it != cart_locations_.end() && it->first.first == store; ++it) {
    out.push_back(it->second);
  }
  return out;
}

std::optional<CartLocationRecord> StoreDatabase::cart_location(StoreId store, CartId cart) const {
  auto it = cart_locations_.find({store, cart});
  if (it == cart_locations_.end()) return std::nullopt;
  return it->second;
}

std::vector<LaneRecord> StoreDatabase::lanes(StoreId store) const {
  require_store(store);
  std::vector<LaneRecord> out;
  for (auto it = lanes_.lower_bound({store, 0}); it != lanes_.end() && it->first.first == store; ++it) {
    out.push_back(it->second);
  }
  return out;
}

std::vector<LocationRecord> StoreDatabase::locations(StoreId store) const {
  require_store(store);
  std::vector<LocationRecord> out;
  for (auto it = locations_.lower_bound({store, 0});
       it != locations_.end() && it->first.first == store; ++it) {
    out.push_back(it->second);
  }
  return out;
}

std::vector<InventoryRecord> StoreDatabase::inventory(StoreId store) const {
  require_store(store);
  std::vector<InventoryRecord> out;
  for (auto it = inventory_.lower_bound({store, 0});
       it != inventory_.end() && it->first.first == store; ++it) {
    out.push_back(it->second);
  }
  return out;
}

std::vector<Ticket> StoreDatabase::tickets(StoreId store, TicketKind kind,
                                           std::optional<TicketStatus> status) const {
  require_store(store);
  std::vector<Ticket> out;
  for (const auto& [id, t] : tickets_) {
    if (t.store_id == store && t.kind == kind && (!status || t.status == *status)) {
      out.push_back(t);
    }
  }
  return out;
}

const positioning::TagMap& StoreDatabase::tag_map(StoreId store) const {
  require_store(store);
  return mappings_.at(store);
}

const FoodTagRecord& StoreDatabase::foodtag(const std::string& tag_id) const {
  auto it = foodtags_.find(tag_id);
  if (it == foodtags_.end()) throw Error(ErrorCode::kReference, "unknown food tag " + tag_id);
  return it->second;
}

std::vector<std::string> StoreDatabase::foodtag_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, r] : foodtags_) out.push_back(id);
  return out;
}

std::vector<Change> StoreDatabase::changes() const {
  std::vector<Change> out;
  auto add = [&](std::string_view table, nlohmann::json record) {
    out.push_back(Change{{"table", table}, {"record", std::move(record)}});
  };
  for (const auto& [id, r] : stores_) add("store", r);
  for (const auto& [id, r] : products_) add("product", r);
  for (const auto& [key, r] : locations_) add("location", r);
  for (const auto& [store, map] : mappings_) {
    for (const auto& [tag_id, p] : map.entries()) {
      add("mapping", MappingRecord{store, tag_id, p.location_id, p.position.x, p.position.y});
    }
  }
  for (const auto& [key, r] : inventory_) add("inventory", r);
  for (const auto& [store, cart] : carts_) add("cart", {{"store_id", store}, {"cart_id", cart}});
  for (const auto& [key, r] : cart_locations_) add("cart_location", r);
  for (const auto& [key, r] : lanes_) add("lane", r);
  for (const auto& [id, t] : tickets_) add("ticket", t);
  for (const auto& [id, r] : foodtags_) add("foodtag", r);
  return out;
}

bool StoreDatabase::same_contents(const StoreDatabase& o) const {
  if (mappings_.size() != o.mappings_.size()) return false;
  for (const auto& [store, map] : mappings_) {
    auto it = o.mappings_.find(store);
    if (it == o.mappings_.end() || it->second.entries() != map.entries()) return false;
  }
  return stores_ == o.stores_ && products_ == o.products_ && locations_ == o.locations_ &&
         inventory_ == o.inventory_ && carts_ == o.carts_ && cart_locations_ == o.cart_locations_ &&
         lanes_ == o.lanes_ && tickets_ == o.tickets_ && foodtags_ == o.foodtags_ &&
         next_ticket_id_ == o.next_ticket_id_;
}

}  // namespace sysmart::backend
