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

#include "sysmart/simulator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "sysmart/cartlink.hpp"
#include "sysmart/json_codec.hpp"
#include "sysmart/wiegand.hpp"

#ifndef SYSMART_SOURCE_DIR
#define SYSMART_SOURCE_DIR "."
#endif

namespace sysmart::sim {
namespace {

using nlohmann::json;

// A 6 x 1 corridor with one tag at x = 4.5 and a product there.
Scenario corridor() {
  Scenario s;
  s.seed = 3;
  s.epoch = 1700000000;
  s.duration = 20.0;
  s.grid = positioning::StoreGrid(6, 1, 1.0);
  s.tags = positioning::TagMap(1);
  s.tags.add("00ABCD", {77, {4.5, 0.5}});
  s.products = {{5, "Soap", 77, 3}};
  s.carts = {{1, {0, 0}}};
  s.shoppers = {{1, {5}, 1.0, 0.0, 2.0, std::nullopt}};
  return s;
}

Scenario small_case_study(double duration, int carts) {
  auto s = make_case_study_scenario(7);
  s.duration = duration;
  s.carts.resize(carts);
  s.shoppers.resize(carts);
  return s;
}

template <typename T>
std::vector<std::pair<double, T>> events_of(const SimulationResult& r) {
  std::vector<std::pair<double, T>> out;
  for (const auto& e : r.events) {
    if (const auto* p = std::get_if<T>(&e.payload)) out.emplace_back(e.time, *p);
  }
  return out;
}

TEST(Simulator, OneCartOneTag) {
  const auto s = corridor();
  const auto r = run(s);
  const auto row = r.local.cart_location(1, 1);
  ASSERT_TRUE(row);
  EXPECT_EQ(row->cart_location, 77u);
  const auto reads = events_of<TagRead>(r);
  ASSERT_EQ(reads.size(), 1u);
  EXPECT_EQ(wiegand::payload_to_tag_id(reads[0].second.payload), "00ABCD");
  // Leaving x = 0.5 at 1 m/s, the cart is 0.2 m from the tag at t = 3.8.
  EXPECT_NEAR(reads[0].first, 3.8, 1e-9);
  EXPECT_EQ(r.local.find_item(1, 5).count, 2u);
}

TEST(Simulator, SameSeedSameLog) {
  const auto s = small_case_study(300.0, 30);
  const auto a = run(s);
  const auto b = run(s);
  EXPECT_EQ(events_to_jsonl(s, a.events), events_to_jsonl(s, b.events));
  EXPECT_EQ(final_state_json(a), final_state_json(b));
  EXPECT_EQ(a.food_tag_images, b.food_tag_images);
  EXPECT_EQ(digest(s, a), digest(s, b));

  auto other = s;
  other.seed = 8;
  EXPECT_NE(digest(other, run(other)), digest(s, a));
}

TEST(Simulator, EventTimesNeverDecrease) {
  const auto s = small_case_study(300.0, 40);
  const auto r = run(s);
  for (std::size_t i = 1; i < r.events.size(); ++i) {
    ASSERT_LE(r.events[i - 1].time, r.events[i].time) << "event " << i;
  }
}

TEST(Simulator, EveryDeliveredPacketIsUpsertedOnceAndCollisionsRetry) {
  auto s = small_case_study(600.0, 150);
  // A slow radio makes collisions common enough to exercise retries.
  s.rate_bps = 2e5;
  const auto r = run(s);

  std::map<std::pair<CartId, std::uint64_t>, int> sent, upserted, collided, retried, resent;
  for (const auto& [t, e] : events_of<PacketSent>(r)) {
    ++sent[{e.cart, e.window}];
    if (e.retry) ++resent[{e.cart, e.window}];
  }
  for (const auto& [t, e] : events_of<DbUpsert>(r)) ++upserted[{e.cart, e.window}];
  for (const auto& [t, e] : events_of<Collision>(r)) ++collided[{e.cart, e.window}];
  for (const auto& [t, e] : events_of<Retry>(r)) ++retried[{e.cart, e.window}];

  ASSERT_GT(collided.size(), 20u);
  for (const auto& [key, n] : sent) {
    ASSERT_EQ(n, 1);
    const int outcomes = (upserted.contains(key) ? upserted[key] : 0) + (collided.contains(key) ? 1 : 0);
    const bool last_window = key.second + 1 >= r.windows.size();
    if (!last_window) EXPECT_EQ(outcomes, 1) << "cart " << key.first << " window " << key.second;
  }
  for (const auto& [key, n] : collided) {
    const std::pair next{key.first, key.second + 1};
    if (next.second >= r.windows.size()) continue;
    EXPECT_EQ(retried[next], 1);
    EXPECT_EQ(resent[next], 1);
  }
  for (const auto& [key, n] : upserted) EXPECT_TRUE(sent.contains(key));
}

TEST(Simulator, ReadsAndUpsertsFollowGroundTruth) {
  const auto s = small_case_study(400.0, 25);
  const auto r = run(s);

  std::map<double, std::vector<CartTruth>> truth_at;
  auto truth = [&](double t, CartId cart) {
    auto it = truth_at.find(t);
    if (it == truth_at.end()) it = truth_at.emplace(t, ground_truth(s, t)).first;
    for (const auto& c : it->second) {
      if (c.cart == cart) return c;
    }
    throw std::logic_error("cart missing from ground truth");
  };

  const auto reads = events_of<TagRead>(r);
  ASSERT_GT(reads.size(), 50u);
  for (const auto& [t, e] : reads) {
    const auto g = truth(t, e.cart);
    ASSERT_TRUE(g.tag_id) << "read at " << t << " with no tag in range";
    EXPECT_EQ(*g.tag_id, wiegand::payload_to_tag_id(e.payload));
  }

  // The sensed location only ever changes to the ground-truth location at
  // the time the carried tag was read.
  std::map<CartId, LocationId> sensed;
  for (const auto& [t, e] : events_of<DbUpsert>(r)) {
    const auto g = truth(e.read_time, e.cart);
    ASSERT_TRUE(g.location);
    if (!sensed.contains(e.cart) || sensed[e.cart] != e.location) {
      EXPECT_EQ(e.location, *g.location) << "cart " << e.cart << " at " << t;
    }
    sensed[e.cart] = e.location;
  }
}

TEST(Simulator, CaseStudyEndsWithEveryCartAtItsTag) {
  const auto s = make_case_study_scenario(7);
  ASSERT_EQ(s.carts.size(), 150u);
  ASSERT_EQ(s.tags.size(), 230u);
  const auto r = run(s);
  const auto truth = ground_truth(s, s.duration);
  int checked = 0;
  for (const auto& g : truth) {
    if (!r.last_read_delivered.at(g.cart)) continue;
    ASSERT_TRUE(g.location) << "cart " << g.cart;
    const auto row = r.local.cart_location(s.store.store_id, g.cart);
    ASSERT_TRUE(row);
    EXPECT_EQ(row->cart_location, *g.location) << "cart " << g.cart;
    ++checked;
  }
  EXPECT_EQ(checked, 150);
  EXPECT_EQ(r.main.cart_locations(1), r.local.cart_locations(1));

  // Windows holding at least one collision, against the exact per-window
  // probability for that window's sender count.
  const double airtime = cartlink::packet_airtime(cartlink::kPacketBits, s.overhead_bits, s.rate_bps);
  double mean = 0.0, var = 0.0;
  int hits = 0;
  for (const auto& w : r.windows) {
    const double p = cartlink::analytic_collision_probability(w.senders, airtime, s.window);
    mean += p;
    var += p * (1 - p);
    hits += w.colliding_pairs > 0;
  }
  EXPECT_NEAR(hits, mean, 3 * std::sqrt(var));
}

TEST(Simulator, FoodTagsKeepTheirInvariants) {
  const auto s = small_case_study(3600.0, 0);
  const auto r = run(s);
  ASSERT_EQ(r.food_tag_images.size(), 5u);
  for (std::size_t k = 0; k < s.food_tags.size(); ++k) {
    const auto& spec = s.food_tags[k];
    foodtrack::ManualRtc rtc;
    const auto tag = foodtrack::FoodTag::from_memory_image(r.food_tag_images.at(spec.tag_id), rtc);
    const auto log = tag.log();
    ASSERT_GE(log.size(), 1u);
    for (std::size_t i = 1; i < log.size(); ++i) {
      EXPECT_GT(log[i].minutes_since_first, log[i - 1].minutes_since_first);
      const bool moved = std::abs(int(log[i].temp_raw) - int(log[i - 1].temp_raw)) >= spec.config.thresholds.temp_raw ||
                         std::abs(int(log[i].hum_raw) - int(log[i - 1].hum_raw)) >= spec.config.thresholds.hum_raw;
      EXPECT_TRUE(moved);
    }
    EXPECT_EQ(tag.plant_events().size(), spec.plant_events.size());
    EXPECT_EQ(r.local.foodtag(spec.tag_id).dump, tag.dump());
  }
  // The steady tag logs only its first reading and the profile steps it sees.
  foodtrack::ManualRtc rtc;
  const auto steady = foodtrack::FoodTag::from_memory_image(r.food_tag_images.at("FT-1"), rtc);
  EXPECT_EQ(steady.log_count(), 4u);
}

TEST(Simulator, LaneJoinsPickTheFastestLane) {
  const auto s = small_case_study(3600.0, 150);
  const auto r = run(s);
  const auto joins = events_of<LaneJoin>(r);
  EXPECT_EQ(joins.size(), 150u);
  EXPECT_GT(events_of<LaneServe>(r).size(), 0u);
}

TEST(GroundTruth, StartAndStationaryCarts) {
  auto s = corridor();
  s.carts.push_back({2, {2, 0}});
  const auto at0 = ground_truth(s, 0.0);
  ASSERT_EQ(at0.size(), 2u);
  EXPECT_EQ(at0[0].position, (Point{0.5, 0.5}));
  EXPECT_EQ(at0[1].position, (Point{2.5, 0.5}));
  for (double t : {0.0, 5.0, 20.0}) EXPECT_EQ(ground_truth(s, t)[1].position, (Point{2.5, 0.5}));
  EXPECT_EQ(ground_truth(s, 4.0)[0].location, 77u);
  EXPECT_EQ(ground_truth(s, 2.0)[0].location, std::nullopt);
  try {
    ground_truth(s, 21.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kArgument);
  }
}

TEST(Scenario, JsonRoundTrip) {
  const auto s = make_case_study_scenario(7);
  const auto j = scenario_to_json(s);
  EXPECT_EQ(scenario_to_json(scenario_from_json(j)), j);

  const auto small = small_case_study(60.0, 10);
  const auto reloaded = scenario_from_json(scenario_to_json(small));
  EXPECT_EQ(digest(small, run(small)), digest(reloaded, run(reloaded)));
}

TEST(Scenario, ShippedCaseStudyMatchesGenerator) {
  const auto shipped = load_scenario(SYSMART_SOURCE_DIR "/scenarios/case_study.json");
  EXPECT_EQ(scenario_to_json(shipped), scenario_to_json(make_case_study_scenario(7)));
}

std::string validation_message(json j) {
  try {
    scenario_from_json(j);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
    return e.what();
  }
  return "";
}

TEST(Scenario, ErrorsNameTheField) {
  const auto base = scenario_to_json(corridor());
  auto with = [&](const json::json_pointer& ptr, json value) {
    auto j = base;
    j[ptr] = std::move(value);
    return validation_message(j);
  };
  EXPECT_NE(with("/shoppers/0/speed"_json_pointer, -1).find("shoppers[0].speed"), std::string::npos);
  EXPECT_NE(with("/shoppers/0/waypoints/0"_json_pointer, 9).find("shoppers[0].waypoints[0]"),
            std::string::npos);
  EXPECT_NE(with("/tags/0/tag_id"_json_pointer, "zz").find("tags[0].tag_id"), std::string::npos);
  EXPECT_NE(with("/carts/0/start"_json_pointer, json::array({9, 0})).find("carts[0].start"),
            std::string::npos);
  EXPECT_NE(with("/carts/0/cart_id"_json_pointer, 70000).find("carts[0].cart_id"), std::string::npos);
  EXPECT_NE(with("/tick"_json_pointer, 0).find("tick"), std::string::npos);
  EXPECT_NE(with("/window"_json_pointer, 0.25).find("window"), std::string::npos);
  EXPECT_NE(with("/grid/width"_json_pointer, "wide").find("grid.width"), std::string::npos);
  EXPECT_NE(with("/epoch"_json_pointer, "yesterday").find("epoch"), std::string::npos);

  auto j = base;
  j.erase("store");
  EXPECT_NE(validation_message(j).find("store"), std::string::npos);

  j = base;
  j["grid"]["blocked"] = json::array({json::array({3, 0})});
  EXPECT_NE(validation_message(j).find("shoppers[0]"), std::string::npos);
}

TEST(Scenario, FoodTagErrors) {
  auto j = scenario_to_json(make_case_study_scenario(7));
  j["food_tags"][2]["password"] = "short";
  EXPECT_NE(validation_message(j).find("food_tags[2]"), std::string::npos);
  j = scenario_to_json(make_case_study_scenario(7));
  j["food_tags"][0]["profile"][1]["rh"] = 140;
  EXPECT_NE(validation_message(j).find("food_tags[0].profile[1].rh"), std::string::npos);
}

TEST(Export, JsonLinesAndCsv) {
  const auto s = corridor();
  const auto r = run(s);
  const auto jsonl = events_to_jsonl(s, r.events);
  std::size_t lines = 0;
  std::size_t start = 0;
  while (start < jsonl.size()) {
    const auto end = jsonl.find('\n', start);
    const auto obj = json::parse(jsonl.substr(start, end - start));
    EXPECT_TRUE(obj.contains("t"));
    EXPECT_TRUE(obj.contains("kind"));
    start = end + 1;
    ++lines;
  }
  EXPECT_EQ(lines, r.events.size());
  EXPECT_NE(jsonl.find(R"({"t":3.800000000,"kind":"tag-read","cart":1,"tag":"00ABCD"})"), std::string::npos);

  const auto csv = events_to_csv(s, r.events);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "time,kind,details");
  EXPECT_NE(csv.find("3.800000000,tag-read,cart=1;tag=00ABCD\n"), std::string::npos);
  EXPECT_EQ(digest(s, r).size(), 16u);
}

}  // namespace
}  // namespace sysmart::sim
