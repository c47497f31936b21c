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

#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <thread>

#include "sysmart/json_codec.hpp"
#include "sysmart/service.hpp"

namespace sysmart::backend {
namespace {

using cartlink::CartPositionPacket;

constexpr double kEarthRadiusKm = 6371.0088;

// Latitude offset, in degrees, that lies `km` north of the equator.
double km_north(double km) { return km / kEarthRadiusKm * 180.0 / M_PI; }

StoreDatabase small_store() {
  StoreDatabase db;
  db.upsert_store({1, "Main St", 0.0, 0.0, TrafficStatus::kLow, 12});
  db.upsert_product({100, "Milk"});
  db.upsert_product({200, "Bread"});
  db.upsert_location({10, 1, "Dairy", 1.0, 1.0});
  db.upsert_location({20, 1, "Bakery", 3.0, 3.0});
  db.upsert_mapping({1, "00000A", 10, 1.0, 1.0});
  db.upsert_mapping({1, "00000B", 20, 3.0, 3.0});
  db.upsert_inventory({1, 100, 7, 10, 0});
  db.upsert_inventory({1, 200, 0, 20, 0});
  db.register_cart(1, 42);
  db.register_cart(1, 43);
  return db;
}

TEST(Ingest, ValidPacketUpsertsRow) {
  auto db = small_store();
  const auto row = db.ingest_position({1, 42, "00000A"}, 1000);
  EXPECT_EQ(row, (CartLocationRecord{1, 42, 10, 1000}));
  EXPECT_EQ(db.cart_location(1, 42), row);
}

TEST(Ingest, UnknownTagLeavesRowIntact) {
  auto db = small_store();
  db.ingest_position({1, 42, "00000A"}, 1000);
  try {
    db.ingest_position({1, 42, "FFFFFF"}, 1001);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLookup);
  }
  EXPECT_EQ(db.cart_location(1, 42), (CartLocationRecord{1, 42, 10, 1000}));
}

TEST(Ingest, UnknownStoreOrCartIsReferenceError) {
  auto db = small_store();
  for (const CartPositionPacket& p : {CartPositionPacket{2, 42, "00000A"},
                                      CartPositionPacket{1, 99, "00000A"}}) {
    try {
      db.ingest_position(p, 1);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kReference);
    }
  }
}

TEST(Ingest, LaterPacketWins) {
  auto db = small_store();
  db.ingest_position({1, 42, "00000A"}, 1000);
  db.ingest_position({1, 42, "00000B"}, 1005);
  EXPECT_EQ(db.cart_location(1, 42), (CartLocationRecord{1, 42, 20, 1005}));
}

TEST(Ingest, LatePacketIsDropped) {
  auto db = small_store();
  db.ingest_position({1, 42, "00000B"}, 1005);
  const auto row = db.ingest_position({1, 42, "00000A"}, 1000);
  EXPECT_EQ(row, (CartLocationRecord{1, 42, 20, 1005}));
  EXPECT_EQ(db.cart_location(1, 42), row);
}

TEST(Ingest, FinalRowIsLastResolvedPacket) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> tags{"00000A", "00000B", "00000C"};
  for (int round = 0; round < 200; ++round) {
    auto db = small_store();
    std::map<CartId, CartLocationRecord> expected;
    UnixTime now = 0;
    for (int i = 0; i < 40; ++i) {
      now += static_cast<UnixTime>(rng() % 3);
      const CartId cart = 42 + static_cast<CartId>(rng() % 2);
      const auto& tag = tags[rng() % tags.size()];
      try {
        db.ingest_position({1, cart, tag}, now);
        expected[cart] = {1, cart, tag == "00000A" ? 10u : 20u, now};
      } catch (const Error& e) {
        ASSERT_EQ(e.code(), ErrorCode::kLookup);
        ASSERT_EQ(tag, "00000C");
      }
    }
    for (CartId cart : {42, 43}) {
      if (expected.contains(cart)) {
        EXPECT_EQ(db.cart_location(1, cart), expected[cart]);
      } else {
        EXPECT_EQ(db.cart_location(1, cart), std::nullopt);
      }
    }
  }
}

TEST(FindItem, StockedAndOutOfStock) {
  const auto db = small_store();
  EXPECT_EQ(db.find_item(1, 100), (ItemLocation{7, 10}));
  EXPECT_EQ(db.find_item(1, 200), (ItemLocation{0, 20}));
}

TEST(FindItem, UnknownProductOrStore) {
  const auto db = small_store();
  for (auto [store, product] : {std::pair<StoreId, ProductId>{1, 999}, {9, 100}}) {
    try {
      db.find_item(store, product);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kReference);
    }
  }
}

TEST(Branches, PrefersNearerStoreAndSkipsEmptyOnes) {
  StoreDatabase db;
  db.upsert_product({5, "Flour"});
  db.upsert_store({1, "A", 0.0, 0.0, TrafficStatus::kLow, 0});
  db.upsert_store({2, "B", km_north(2.0), 0.0, TrafficStatus::kLow, 0});
  db.upsert_store({3, "C", km_north(1.0), 0.0, TrafficStatus::kLow, 0});
  db.upsert_inventory({1, 5, 0, 0, 0});
  db.upsert_inventory({2, 5, 3, 0, 0});
  db.upsert_inventory({3, 5, 1, 0, 0});
  const auto out = db.alternative_branches(5, 1);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].store_id, 3);
  EXPECT_EQ(out[1].store_id, 2);
  EXPECT_NEAR(out[0].distance_km, 1.0, 1e-9);
  EXPECT_NEAR(out[1].distance_km, 2.0, 1e-9);
}

TEST(Branches, StockedNowhereAndSingleton) {
  StoreDatabase db;
  db.upsert_product({5, "Flour"});
  db.upsert_store({1, "A", 0.0, 0.0, TrafficStatus::kLow, 0});
  db.upsert_store({2, "B", 1.0, 1.0, TrafficStatus::kLow, 0});
  EXPECT_TRUE(db.alternative_branches(5, 1).empty());
  db.upsert_inventory({2, 5, 4, 0, 0});
  EXPECT_EQ(db.alternative_branches(5, 1).size(), 1u);
  EXPECT_TRUE(db.alternative_branches(5, 2).empty());
}

TEST(Branches, UnknownProductIsReferenceError) {
  const auto db = small_store();
  try {
    db.alternative_branches(999, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kReference);
  }
}

// Central angle via unit vectors, independent of the haversine form.
double chord_km(double lat1, double lon1, double lat2, double lon2) {
  auto unit = [](double lat, double lon) {
    const double a = lat * M_PI / 180.0, b = lon * M_PI / 180.0;
    return std::array<double, 3>{std::cos(a) * std::cos(b), std::cos(a) * std::sin(b), std::sin(a)};
  };
  const auto u = unit(lat1, lon1), v = unit(lat2, lon2);
  const double dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
  const std::array<double, 3> cross{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
                                    u[0] * v[1] - u[1] * v[0]};
  const double sin_angle = std::sqrt(cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]);
  return kEarthRadiusKm * std::atan2(sin_angle, dot);
}

TEST(Branches, MatchesBruteForceSort) {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 300; ++round) {
    StoreDatabase db;
    db.upsert_product({1, "P"});
    const int stores = 1 + static_cast<int>(rng() % 25);
    std::vector<StoreRecord> records;
    std::map<StoreId, std::uint32_t> counts;
    for (int s = 1; s <= stores; ++s) {
      StoreRecord r{static_cast<StoreId>(s), "S", std::uniform_real_distribution<>(29.0, 31.0)(rng),
                    std::uniform_real_distribution<>(-98.0, -96.0)(rng), TrafficStatus::kLow, 0};
      // Some stores share a site to exercise the id tie-break.
      if (s > 1 && rng() % 5 == 0) {
        r.lat = records.back().lat;
        r.lon = records.back().lon;
      }
      records.push_back(r);
      db.upsert_store(r);
      if (rng() % 4 != 0) {
        counts[r.store_id] = static_cast<std::uint32_t>(rng() % 4);
        db.upsert_inventory({r.store_id, 1, counts[r.store_id], 0, 0});
      }
    }
    const StoreId origin = static_cast<StoreId>(1 + rng() % stores);
    const auto& o = records[origin - 1];

    std::vector<std::pair<double, StoreId>> oracle;
    for (const auto& r : records) {
      if (r.store_id == origin || counts[r.store_id] == 0) continue;
      oracle.emplace_back(chord_km(o.lat, o.lon, r.lat, r.lon), r.store_id);
    }
    // Insertion sort with an explicit tolerance on distance ties.
    for (std::size_t i = 1; i < oracle.size(); ++i) {
      for (std::size_t j = i; j > 0; --j) {
        const auto& a = oracle[j - 1];
        const auto& b = oracle[j];
        const bool same = std::abs(a.first - b.first) < 1e-9;
        if ((same && b.second < a.second) || (!same && b.first < a.first)) {
          std::swap(oracle[j - 1], oracle[j]);
        }
      }
    }

    const auto got = db.alternative_branches(1, origin);
    ASSERT_EQ(got.size(), oracle.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].store_id, oracle[i].second) << "round " << round << " index " << i;
      EXPECT_NEAR(got[i].distance_km, oracle[i].first, 1e-6);
      EXPECT_EQ(got[i].count, counts[got[i].store_id]);
    }
  }
}

StoreDatabase lanes_store(const std::map<LaneId, std::vector<std::uint32_t>>& queues) {
  StoreDatabase db;
  db.upsert_store({1, "S", 0, 0, TrafficStatus::kLow, 0});
  for (const auto& [id, q] : queues) db.upsert_lane({1, id, q});
  return db;
}

TEST(FastestLane, FewestQueuedItems) {
  EXPECT_EQ(lanes_store({{1, {5, 3}}, {2, {10}}}).fastest_lane(1, 4), 1u);
}

TEST(FastestLane, TieGoesToLowestId) {
  EXPECT_EQ(lanes_store({{1, {4}}, {2, {4}}}).fastest_lane(1, 1), 1u);
  EXPECT_EQ(lanes_store({{1, {}}, {2, {}}, {3, {}}}).fastest_lane(1, 1), 1u);
}

TEST(FastestLane, OverheadCountsCustomers) {
  auto db = lanes_store({{1, {1, 1, 1, 1}}, {2, {5}}});
  EXPECT_EQ(db.fastest_lane(1, 3), 1u);
  db.set_checkout_overhead(2.0);
  EXPECT_EQ(db.fastest_lane(1, 3), 2u);
}

TEST(FastestLane, Errors) {
  const auto db = lanes_store({{1, {}}});
  try {
    db.fastest_lane(1, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kArgument);
  }
  try {
    lanes_store({}).fastest_lane(1, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kState);
  }
}

TEST(FastestLane, MatchesExhaustiveArgmin) {
  std::mt19937_64 rng(8);
  for (int round = 0; round < 2000; ++round) {
    std::map<LaneId, std::vector<std::uint32_t>> queues;
    const int lanes = 1 + static_cast<int>(rng() % 20);
    const int customers = static_cast<int>(rng() % 51);
    std::vector<LaneId> ids;
    for (int i = 0; i < lanes; ++i) {
      const LaneId id = static_cast<LaneId>(1 + rng() % 40);
      queues[id];
    }
    for (const auto& [id, q] : queues) ids.push_back(id);
    for (int c = 0; c < customers; ++c) {
      queues[ids[rng() % ids.size()]].push_back(static_cast<std::uint32_t>(1 + rng() % 12));
    }
    const double overhead = static_cast<double>(rng() % 4);
    auto db = lanes_store(queues);
    db.set_checkout_overhead(overhead);
    const int mine = static_cast<int>(1 + rng() % 30);

    // Exhaustive: the waiting time seen by this shopper in each lane.
    LaneId best = 0;
    double best_wait = 0;
    bool first = true;
    for (const auto& [id, q] : queues) {
      double wait = mine + overhead;
      for (auto n : q) wait += n + overhead;
      if (first || wait < best_wait || (wait == best_wait && id < best)) {
        best = id;
        best_wait = wait;
        first = false;
      }
    }
    ASSERT_EQ(db.fastest_lane(1, mine), best) << "round " << round;
  }
}

TEST(Lanes, JoinAndServe) {
  auto db = lanes_store({{1, {}}});
  db.join_lane(1, 1, 4);
  db.join_lane(1, 1, 2);
  EXPECT_EQ(db.lanes(1)[0].queue, (std::vector<std::uint32_t>{4, 2}));
  EXPECT_EQ(db.serve_lane(1, 1), 4u);
  EXPECT_EQ(db.serve_lane(1, 1), 2u);
  EXPECT_EQ(db.serve_lane(1, 1), std::nullopt);
}

TEST(Lanes, ZeroItemQueueRejected) {
  StoreDatabase db;
  db.upsert_store({1, "S", 0, 0, TrafficStatus::kLow, 0});
  EXPECT_THROW(db.upsert_lane({1, 1, {3, 0}}), Error);
}

TEST(Tickets, Lifecycle) {
  auto db = small_store();
  const auto t = db.open_ticket(TicketKind::kAssistance, 1, 42, 500);
  EXPECT_EQ(t.status, TicketStatus::kOpen);
  EXPECT_EQ(t.created_at, 500);
  EXPECT_EQ(db.acknowledge(TicketKind::kAssistance, t.id, 510).status, TicketStatus::kAcknowledged);
  const auto done = db.resolve(TicketKind::kAssistance, t.id, 520);
  EXPECT_EQ(done.status, TicketStatus::kResolved);
  EXPECT_EQ(done.created_at, 500);
  EXPECT_EQ(done.updated_at, 520);
}

TEST(Tickets, IllegalTransitions) {
  auto db = small_store();
  const auto t = db.open_ticket(TicketKind::kMalfunction, 1, 42, 0);
  auto expect_transition = [&](auto fn) {
    try {
      fn();
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kTransition);
    }
  };
  expect_transition([&] { db.resolve(TicketKind::kMalfunction, t.id, 1); });
  db.acknowledge(TicketKind::kMalfunction, t.id, 1);
  db.resolve(TicketKind::kMalfunction, t.id, 2);
  expect_transition([&] { db.acknowledge(TicketKind::kMalfunction, t.id, 3); });
  expect_transition([&] { db.resolve(TicketKind::kMalfunction, t.id, 3); });
}

TEST(Tickets, KindsAndCartsAreChecked) {
  auto db = small_store();
  const auto t = db.open_ticket(TicketKind::kAssistance, 1, 42, 0);
  EXPECT_THROW(db.acknowledge(TicketKind::kMalfunction, t.id, 1), Error);
  EXPECT_THROW(db.open_ticket(TicketKind::kAssistance, 1, 77, 0), Error);
}

TEST(Tickets, RandomSequencesNeverSkipOrReverse) {
  std::mt19937_64 rng(21);
  for (int round = 0; round < 200; ++round) {
    auto db = small_store();
    std::map<TicketId, std::pair<TicketKind, TicketStatus>> model;
    for (int i = 0; i < 50; ++i) {
      const int op = static_cast<int>(rng() % 3);
      if (op == 0 || model.empty()) {
        const auto kind = rng() % 2 ? TicketKind::kAssistance : TicketKind::kMalfunction;
        const auto t = db.open_ticket(kind, 1, 42, i);
        ASSERT_FALSE(model.contains(t.id));
        model[t.id] = {kind, TicketStatus::kOpen};
        continue;
      }
      auto it = model.begin();
      std::advance(it, static_cast<long>(rng() % model.size()));
      auto& [kind, status] = it->second;
      const auto want = op == 1 ? TicketStatus::kAcknowledged : TicketStatus::kResolved;
      const bool legal = static_cast<int>(want) == static_cast<int>(status) + 1;
      try {
        const auto t = op == 1 ? db.acknowledge(kind, it->first, i) : db.resolve(kind, it->first, i);
        ASSERT_TRUE(legal);
        ASSERT_EQ(t.status, want);
        status = want;
      } catch (const Error& e) {
        ASSERT_EQ(e.code(), ErrorCode::kTransition);
        ASSERT_FALSE(legal);
      }
      for (const auto& [id, entry] : model) ASSERT_EQ(db.ticket(entry.first, id).status, entry.second);
    }
  }
}

TEST(Sync, ApplyingTwiceEqualsOnce) {
  auto local = small_store();
  local.ingest_position({1, 42, "00000A"}, 100);
  local.ingest_position({1, 43, "00000B"}, 101);
  const auto snap = local.snapshot(1);

  auto main_db = small_store();
  EXPECT_EQ(main_db.sync_push(snap), 2u);
  auto once = main_db;
  EXPECT_EQ(main_db.sync_push(snap), 0u);
  EXPECT_TRUE(main_db.same_contents(once));
  EXPECT_EQ(main_db.cart_locations(1), snap.carts);
}

TEST(Sync, OlderRecordIsIgnored) {
  auto main_db = small_store();
  main_db.ingest_position({1, 42, "00000B"}, 200);
  Snapshot snap{1, {{1, 42, 10, 150}}, {}};
  EXPECT_EQ(main_db.sync_push(snap), 0u);
  EXPECT_EQ(main_db.cart_location(1, 42)->cart_location, 20u);
  snap.carts[0].updated_at = 200;  // ties go to the incoming record
  EXPECT_EQ(main_db.sync_push(snap), 1u);
  EXPECT_EQ(main_db.cart_location(1, 42)->cart_location, 10u);
}

TEST(Sync, UnknownStoreIsReferenceError) {
  auto main_db = small_store();
  try {
    main_db.sync_push({9, {}, {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kReference);
  }
}

TEST(Sync, DisjointSnapshotsCommute) {
  auto base = small_store();
  base.upsert_store({2, "Second", 1.0, 1.0, TrafficStatus::kHigh, 0});
  std::mt19937_64 rng(4);
  for (int round = 0; round < 100; ++round) {
    Snapshot a{1, {}, {}}, b{2, {}, {}};
    for (CartId c = 1; c <= 5; ++c) {
      if (rng() % 2) a.carts.push_back({1, c, static_cast<LocationId>(rng() % 9), static_cast<UnixTime>(rng() % 50)});
      if (rng() % 2) b.carts.push_back({2, c, static_cast<LocationId>(rng() % 9), static_cast<UnixTime>(rng() % 50)});
    }
    if (rng() % 2) a.inventory.push_back({1, 100, static_cast<std::uint32_t>(rng() % 9), 10, 60});
    if (rng() % 2) b.inventory.push_back({2, 200, static_cast<std::uint32_t>(rng() % 9), 20, 60});
    auto ab = base, ba = base;
    ab.sync_push(a);
    ab.sync_push(b);
    ba.sync_push(b);
    ba.sync_push(a);
    EXPECT_TRUE(ab.same_contents(ba));
  }
}

TEST(Json, RecordsRoundTrip) {
  const Ticket t{7, TicketKind::kMalfunction, 1, 42, 1700000000, TicketStatus::kAcknowledged, 1700000060};
  const nlohmann::json j = t;
  EXPECT_EQ(j.at("created_at"), "2023-11-14T22:13:20Z");
  EXPECT_EQ(j.at("status"), "Acknowledged");
  EXPECT_EQ(j.get<Ticket>(), t);

  const Snapshot s{1, {{1, 42, 10, 5}}, {{1, 100, 3, 10, 6}}};
  EXPECT_EQ(nlohmann::json(s).get<Snapshot>(), s);
  const FoodTagRecord f{"T1", {0x53, 0x4d, 0x01}};
  EXPECT_EQ(nlohmann::json(f).get<FoodTagRecord>(), f);
}

TEST(Json, FieldErrorsNamePath) {
  nlohmann::json j = {{"store_id", 70000}};
  try {
    json_field<StoreId>(j, "store_id", "snapshot");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
    EXPECT_NE(std::string(e.what()).find("snapshot.store_id"), std::string::npos);
  }
}

// ---- journaling and the service wrapper ----

void drive_random(Service& svc, std::uint64_t seed, int ops) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> tags{"00000A", "00000B", "00000C"};
  for (int i = 0; i < ops; ++i) {
    try {
      switch (rng() % 5) {
        case 0: {
          const CartPositionPacket p{1, static_cast<CartId>(42 + rng() % 3), tags[rng() % 3]};
          svc.write([&](StoreDatabase& db) { db.ingest_position(p, i); });
          break;
        }
        case 1:
          svc.write([&](StoreDatabase& db) {
            db.open_ticket(TicketKind::kAssistance, 1, 42, i);
          });
          break;
        case 2: {
          const TicketId id = 1 + rng() % 4;
          const bool ack = rng() % 2;
          svc.write([&](StoreDatabase& db) {
            ack ? db.acknowledge(TicketKind::kAssistance, id, i)
                : db.resolve(TicketKind::kAssistance, id, i);
          });
          break;
        }
        case 3: {
          const auto count = static_cast<std::uint32_t>(rng() % 10);
          svc.write([&](StoreDatabase& db) { db.upsert_inventory({1, 100, count, 10, i}); });
          break;
        }
        default: {
          const LaneId lane = static_cast<LaneId>(1 + rng() % 2);
          svc.write([&](StoreDatabase& db) { db.upsert_lane({1, lane, {static_cast<std::uint32_t>(1 + i % 5)}}); });
          break;
        }
      }
    } catch (const Error&) {
    }
  }
}

TEST(Journal, ReplayRebuildsState) {
  auto journal = std::make_shared<MemoryJournal>();
  StoreDatabase setup;
  setup.set_change_sink([&](const Change& c) { journal->append({c}); });
  setup.upsert_store({1, "Main St", 0.0, 0.0, TrafficStatus::kLow, 12});
  setup.upsert_product({100, "Milk"});
  setup.upsert_location({10, 1, "Dairy", 1.0, 1.0});
  setup.upsert_mapping({1, "00000A", 10, 1.0, 1.0});
  setup.upsert_mapping({1, "00000B", 20, 3.0, 3.0});
  setup.register_cart(1, 42);
  setup.register_cart(1, 43);

  Service svc(setup, journal, [] { return UnixTime{0}; });
  drive_random(svc, 99, 400);
  EXPECT_GT(svc.snapshot()->tickets(1, TicketKind::kAssistance).size(), 0u);
  EXPECT_TRUE(replay(journal->changes()).same_contents(*svc.snapshot()));
}

TEST(Journal, FileRoundTripAndTornTail) {
  const auto path = std::filesystem::temp_directory_path() / "sysmart_journal_test.jsonl";
  std::filesystem::remove(path);
  StoreDatabase expected;
  {
    auto journal = std::make_shared<FileJournal>(path);
    Service svc(StoreDatabase{}, journal, [] { return UnixTime{0}; });
    svc.write([](StoreDatabase& db) {
      db.upsert_store({1, "S", 0, 0, TrafficStatus::kMedium, 3});
      db.register_cart(1, 5);
    });
    svc.write([](StoreDatabase& db) { db.open_ticket(TicketKind::kMalfunction, 1, 5, 9); });
    expected = *svc.snapshot();
  }
  EXPECT_TRUE(replay(FileJournal::load(path)).same_contents(expected));

  {
    std::ofstream out(path, std::ios::app);
    out << R"({"table":"store","rec)";
  }
  EXPECT_TRUE(replay(FileJournal::load(path)).same_contents(expected));

  {
    std::ofstream out(path, std::ios::app);
    out << "\n" << R"({"table":"product","record":{"product_id":1,"name":"x"}})" << "\n";
  }
  try {
    FileJournal::load(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
  }
  std::filesystem::remove(path);
}

TEST(Service, FailedWriteRollsBack) {
  auto journal = std::make_shared<MemoryJournal>();
  Service svc(small_store(), journal, [] { return UnixTime{0}; });
  const auto before = svc.snapshot();
  try {
    svc.write([](StoreDatabase& db) {
      db.ingest_position({1, 42, "00000A"}, 5);
      db.ingest_position({1, 42, "FFFFFF"}, 6);
    });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLookup);
  }
  EXPECT_EQ(svc.snapshot(), before);
  EXPECT_EQ(svc.snapshot()->cart_location(1, 42), std::nullopt);
  EXPECT_TRUE(journal->changes().empty());
}

TEST(Service, ReturnsValues) {
  Service svc(small_store(), nullptr, [] { return UnixTime{77}; });
  const auto row = svc.write([&](StoreDatabase& db) { return db.ingest_position({1, 42, "00000B"}, svc.now()); });
  EXPECT_EQ(row, (CartLocationRecord{1, 42, 20, 77}));
}

TEST(Service, ReadersSeeConsistentSnapshots) {
  // Every write moves both carts together; a torn read would show them apart.
  Service svc(small_store(), nullptr, [] { return UnixTime{0}; });
  std::atomic<bool> done{false};
  std::atomic<int> torn{0};
  std::atomic<int> reads{0};
  std::vector<std::thread> readers;
  for (int r = 0; r < 3; ++r) {
    readers.emplace_back([&] {
      while (!done) {
        const auto snap = svc.snapshot();
        const auto a = snap->cart_location(1, 42);
        const auto b = snap->cart_location(1, 43);
        if (a.has_value() != b.has_value() || (a && a->updated_at != b->updated_at)) ++torn;
        ++reads;
      }
    });
  }
  std::vector<std::thread> writers;
  for (int w = 0; w < 2; ++w) {
    writers.emplace_back([&, w] {
      for (int i = 0; i < 200; ++i) {
        const UnixTime t = i * 2 + w;
        svc.write([&](StoreDatabase& db) {
          const std::string tag = t % 2 ? "00000A" : "00000B";
          db.ingest_position({1, 42, tag}, t);
          db.ingest_position({1, 43, tag}, t);
        });
      }
    });
  }
  for (auto& t : writers) t.join();
  done = true;
  for (auto& t : readers) t.join();
  EXPECT_EQ(torn, 0);
  EXPECT_GT(reads, 0);
  const auto final_row = svc.snapshot()->cart_location(1, 42);
  ASSERT_TRUE(final_row);
  EXPECT_EQ(final_row->updated_at, 399);
}

}  // namespace
}  // namespace sysmart::backend
