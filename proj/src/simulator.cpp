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

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <random>

#include "sysmart/json_codec.hpp"
#include "sysmart/timefmt.hpp"
#include "sysmart/wiegand.hpp"

namespace sysmart::sim {
namespace {

using nlohmann::json;

struct Knot {
  double time;
  Point at;
};

enum class ActionKind { kPick, kCheckout };

struct Action {
  double time;
  ActionKind kind;
  ProductId product = 0;
};

// A cart's whole trajectory, fixed before the run starts.
struct Plan {
  CartId cart = 0;
  std::vector<Knot> knots;
  std::vector<Action> actions;
  std::uint32_t items = 0;

  Point position(double t) const {
    if (t <= knots.front().time) return knots.front().at;
    if (t >= knots.back().time) return knots.back().at;
    auto it = std::upper_bound(knots.begin(), knots.end(), t,
                               [](double v, const Knot& k) { return v < k.time; });
    const Knot& b = *it;
    const Knot& a = *(it - 1);
    if (b.time == a.time) return b.at;
    const double f = (t - a.time) / (b.time - a.time);
    return {a.at.x + f * (b.at.x - a.at.x), a.at.y + f * (b.at.y - a.at.y)};
  }
};

Plan make_plan(const Scenario& s, const CartSpec& cart, const ShopperSpec* shopper,
               const std::map<ProductId, LocationId>& product_locations) {
  Plan plan;
  plan.cart = cart.cart_id;
  plan.knots.push_back({0.0, s.grid.center_of(cart.start)});
  if (!shopper) return plan;

  const double step = s.grid.cell_size() / shopper->speed;
  double time = shopper->start_time;
  Cell here = cart.start;
  plan.knots.push_back({time, s.grid.center_of(here)});
  auto walk_to = [&](Cell target) {
    for (const Cell& c : positioning::shortest_path(s.grid, here, target)) {
      time += step;
      plan.knots.push_back({time, s.grid.center_of(c)});
    }
    here = target;
  };
  for (ProductId product : shopper->waypoints) {
    walk_to(positioning::location_cell(product_locations.at(product), s.grid, s.tags));
    plan.actions.push_back({time, ActionKind::kPick, product});
    time += shopper->dwell;
    plan.knots.push_back({time, s.grid.center_of(here)});
  }
  plan.items = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(shopper->waypoints.size()));
  if (shopper->checkout) {
    walk_to(*shopper->checkout);
    plan.actions.push_back({time, ActionKind::kCheckout, 0});
  }
  return plan;
}

std::vector<Plan> make_plans(const Scenario& s) {
  std::map<ProductId, LocationId> product_locations;
  for (const auto& p : s.products) product_locations[p.product_id] = p.location_id;
  std::map<CartId, const ShopperSpec*> by_cart;
  std::map<CartId, std::size_t> shopper_index;
  for (std::size_t i = 0; i < s.shoppers.size(); ++i) {
    by_cart[s.shoppers[i].cart_id] = &s.shoppers[i];
    shopper_index[s.shoppers[i].cart_id] = i;
  }

  std::vector<CartSpec> carts = s.carts;
  std::sort(carts.begin(), carts.end(),
            [](const CartSpec& a, const CartSpec& b) { return a.cart_id < b.cart_id; });
  std::vector<Plan> plans;
  for (const auto& cart : carts) {
    auto it = by_cart.find(cart.cart_id);
    try {
      plans.push_back(make_plan(s, cart, it == by_cart.end() ? nullptr : it->second, product_locations));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kRouting) throw;
      throw Error(ErrorCode::kValidation, "shoppers[" + std::to_string(shopper_index.at(cart.cart_id)) +
                                              "]: " + e.what());
    }
  }
  return plans;
}

foodtrack::UnixSeconds tag_clock(const Scenario& s, double t) {
  return static_cast<foodtrack::UnixSeconds>(s.epoch + static_cast<UnixTime>(std::floor(t)));
}

const ProfileSegment& segment_at(const FoodTagSpec& f, double t) {
  auto it = std::upper_bound(f.profile.begin(), f.profile.end(), t,
                             [](double v, const ProfileSegment& seg) { return v < seg.time; });
  return it == f.profile.begin() ? f.profile.front() : *(it - 1);
}

// One transmission in flight, split into its start and end instants.
struct Scheduled {
  enum Phase { kStart, kEnd } phase;
  CartId cart;
  std::uint32_t payload;
  cartlink::PacketBytes bytes;
  std::uint64_t window;
  std::uint64_t read_seq;
  double read_time;
  bool retry;
  bool collided;
  CartId other;
};

struct CartState {
  std::optional<std::uint32_t> in_field;
  std::optional<std::uint32_t> latest;
  double latest_read_time = 0.0;
  std::uint64_t read_seq = 0;
  std::uint64_t delivered_seq = 0;
  double last_sent = -std::numeric_limits<double>::infinity();
  bool retry_next = false;
  std::size_t next_action = 0;
};

// Reader side of a tag read: frame, line pulses, reassembly, parity check.
std::uint32_t read_through_reader(std::uint32_t payload) {
  const auto frame = wiegand::encode_frame(payload);
  const auto pulses = wiegand::emit_line_events(frame);
  const auto received = wiegand::parse_line_events(pulses);
  const auto bits = wiegand::frame_bits(received);
  return wiegand::decode_frame(bits);
}

}  // namespace

std::string_view kind_name(const EventPayload& payload) {
  struct Names {
    std::string_view operator()(const TagRead&) const { return "tag-read"; }
    std::string_view operator()(const PacketSent&) const { return "packet-sent"; }
    std::string_view operator()(const Collision&) const { return "collision"; }
    std::string_view operator()(const Retry&) const { return "retry"; }
    std::string_view operator()(const DbUpsert&) const { return "db-upsert"; }
    std::string_view operator()(const LaneJoin&) const { return "lane-join"; }
    std::string_view operator()(const LaneServe&) const { return "lane-serve"; }
    std::string_view operator()(const Pick&) const { return "pick"; }
    std::string_view operator()(const SensorSample&) const { return "sensor-sample"; }
    std::string_view operator()(const PlantMark&) const { return "plant-event"; }
    std::string_view operator()(const SyncPush&) const { return "sync"; }
  };
  return std::visit(Names{}, payload);
}

SimulationResult run(const Scenario& s) {
  validate(s);
  const auto plans = make_plans(s);
  const auto ticks = static_cast<std::uint64_t>(std::llround(s.duration / s.tick));
  const auto ticks_per_window = static_cast<std::uint64_t>(std::llround(s.window / s.tick));
  const auto ticks_per_sync =
      s.sync_period > 0 ? static_cast<std::uint64_t>(std::llround(s.sync_period / s.tick)) : 0;
  const double airtime = cartlink::packet_airtime(cartlink::kPacketBits, s.overhead_bits, s.rate_bps);
  const auto store_id = s.store.store_id;

  SimulationResult result;
  result.local = seed_database(s);
  auto& local = result.local;
  auto& main = result.main;
  main.upsert_store(local.store(store_id));
  for (const auto& [id, product] : local.products()) main.upsert_product(product);

  std::vector<std::unique_ptr<foodtrack::ManualRtc>> clocks;
  std::vector<std::unique_ptr<foodtrack::FoodTag>> food;
  std::vector<std::size_t> next_plant_event(s.food_tags.size(), 0);
  std::vector<std::uint64_t> next_sample(s.food_tags.size(), 0);
  for (const auto& f : s.food_tags) {
    clocks.push_back(std::make_unique<foodtrack::ManualRtc>(tag_clock(s, 0.0)));
    food.push_back(std::make_unique<foodtrack::FoodTag>(*clocks.back(), f.log_region_octets));
    food.back()->init(f.config);
  }

  std::map<CartId, CartState> carts;
  for (const auto& plan : plans) carts[plan.cart];
  std::map<LaneId, std::optional<double>> lane_front_since;

  std::mt19937_64 rng(s.seed);
  std::map<std::pair<double, std::uint64_t>, Scheduled> in_flight;
  std::uint64_t flight_seq = 0;
  auto& events = result.events;
  auto emit = [&events](double t, EventPayload p) { events.push_back({t, std::move(p)}); };

  for (std::uint64_t i = 0; i <= ticks; ++i) {
    const double t = static_cast<double>(i) * s.tick;

    // 1. transmissions reaching their start or end
    while (!in_flight.empty() && in_flight.begin()->first.first <= t) {
      const auto node = in_flight.extract(in_flight.begin());
      const double when = node.key().first;
      const Scheduled& f = node.mapped();
      if (f.phase == Scheduled::kStart) {
        emit(when, PacketSent{f.cart, f.payload, f.window, f.retry, f.read_time});
        continue;
      }
      if (f.collided) {
        emit(when, Collision{f.cart, f.other, f.window});
        continue;
      }
      const auto packet = cartlink::decode_packet(f.bytes);
      const UnixTime now = s.epoch + static_cast<UnixTime>(std::floor(when));
      const auto row = local.ingest_position(packet, now);
      auto& cs = carts.at(f.cart);
      cs.delivered_seq = std::max(cs.delivered_seq, f.read_seq);
      emit(when, DbUpsert{f.cart, f.payload, row.cart_location, row.updated_at, f.window, f.read_time});
    }

    // 2. window boundary: retries, then this window's schedule
    if (i % ticks_per_window == 0) {
      const std::uint64_t window = i / ticks_per_window;
      std::vector<CartId> senders;
      for (auto& [id, cs] : carts) {
        if (cs.retry_next) emit(t, Retry{id, window});
        if (!cs.latest) continue;
        const bool fresh = s.transmission.on_new_read && cs.read_seq > cs.delivered_seq;
        const bool beat = s.transmission.heartbeat > 0 &&
                          t - cs.last_sent >= s.transmission.heartbeat - 1e-9;
        if (cs.retry_next || fresh || beat) senders.push_back(id);
      }
      const auto schedule = senders.empty()
                                ? cartlink::TransmissionSchedule{{}, s.window}
                                : cartlink::schedule_transmissions(senders, s.window, airtime, rng);
      const auto pairs = cartlink::detect_collisions(schedule);
      std::map<CartId, CartId> hit;
      for (const auto& [a, b] : pairs) {
        hit.try_emplace(a, b);
        hit.try_emplace(b, a);
        if (hit[a] > b) hit[a] = b;
        if (hit[b] > a) hit[b] = a;
      }
      for (const auto& tx : schedule.entries) {
        auto& cs = carts.at(tx.cart_id);
        const auto payload = *cs.latest;
        const auto collided = hit.find(tx.cart_id);
        Scheduled f{Scheduled::kStart,
                    tx.cart_id,
                    payload,
                    cartlink::encode_packet({store_id, tx.cart_id, wiegand::payload_to_tag_id(payload)}),
                    window,
                    cs.read_seq,
                    cs.latest_read_time,
                    cs.retry_next,
                    collided != hit.end(),
                    collided != hit.end() ? collided->second : CartId{0}};
        in_flight.emplace(std::pair{t + tx.start_time, flight_seq++}, f);
        f.phase = Scheduled::kEnd;
        in_flight.emplace(std::pair{t + tx.start_time + tx.duration, flight_seq++}, f);
        cs.last_sent = t;
      }
      for (auto& [id, cs] : carts) cs.retry_next = hit.contains(id);
      result.windows.push_back({static_cast<std::uint32_t>(senders.size()),
                                static_cast<std::uint32_t>(pairs.size())});
    }

    // 3. motion and reads
    for (const auto& plan : plans) {
      auto& cs = carts.at(plan.cart);
      const auto tag = s.tags.nearest_within(plan.position(t), s.read_range);
      if (!tag) {
        cs.in_field.reset();
        continue;
      }
      const auto payload = wiegand::tag_id_to_payload(*tag);
      if (cs.in_field == payload) continue;
      cs.in_field = payload;
      const auto decoded = read_through_reader(payload);
      if (decoded != payload) throw Error(ErrorCode::kState, "reader returned a different tag");
      cs.latest = decoded;
      cs.latest_read_time = t;
      ++cs.read_seq;
      emit(t, TagRead{plan.cart, decoded});
    }

    // 4. shopper actions
    for (const auto& plan : plans) {
      auto& cs = carts.at(plan.cart);
      while (cs.next_action < plan.actions.size() && plan.actions[cs.next_action].time <= t) {
        const auto& action = plan.actions[cs.next_action++];
        const UnixTime now = s.epoch + static_cast<UnixTime>(std::floor(t));
        if (action.kind == ActionKind::kPick) {
          const auto item = local.find_item(store_id, action.product);
          const std::uint32_t remaining = item.count > 0 ? item.count - 1 : 0;
          local.upsert_inventory({store_id, action.product, remaining, item.location_id, now});
          emit(t, Pick{plan.cart, action.product, remaining});
        } else {
          const auto lane = local.fastest_lane(store_id, static_cast<int>(plan.items));
          local.join_lane(store_id, lane, plan.items);
          emit(t, LaneJoin{plan.cart, lane, plan.items});
        }
      }
    }

    // 5. checkout service
    for (const auto& lane : local.lanes(store_id)) {
      auto& since = lane_front_since[lane.lane_id];
      if (lane.queue.empty()) {
        since.reset();
        continue;
      }
      if (!since) since = t;
      if (t - *since + 1e-9 >= lane.queue.front() / s.lane_service_rate) {
        const auto served = local.serve_lane(store_id, lane.lane_id);
        emit(t, LaneServe{lane.lane_id, *served});
        since = lane.queue.size() > 1 ? std::optional(t) : std::nullopt;
      }
    }

    // 6. food tags
    for (std::size_t k = 0; k < s.food_tags.size(); ++k) {
      const auto& spec = s.food_tags[k];
      auto& tag = *food[k];
      clocks[k]->set(tag_clock(s, t));
      while (next_plant_event[k] < spec.plant_events.size() &&
             spec.plant_events[next_plant_event[k]].time <= t) {
        const auto& e = spec.plant_events[next_plant_event[k]++];
        tag.record_plant_event(e.plant_id, e.kind);
        emit(t, PlantMark{static_cast<std::uint32_t>(k), e.plant_id, e.kind});
      }
      const double due = static_cast<double>(next_sample[k]) * spec.config.sample_interval_minutes * 60.0;
      if (due <= t + 1e-9) {
        ++next_sample[k];
        const auto& seg = segment_at(spec, t);
        const auto temp = foodtrack::celsius_to_raw(seg.temp_c);
        const auto hum = foodtrack::rh_to_raw(seg.rh);
        const bool logged = tag.sample(temp, hum);
        emit(t, SensorSample{static_cast<std::uint32_t>(k), temp, hum, logged});
      }
    }

    // 7. local -> main
    if (ticks_per_sync && i > 0 && i % ticks_per_sync == 0) {
      const auto changed = main.sync_push(local.snapshot(store_id));
      emit(t, SyncPush{static_cast<std::uint32_t>(changed)});
    }
  }

  for (std::size_t k = 0; k < s.food_tags.size(); ++k) {
    result.food_tag_images[s.food_tags[k].tag_id] = food[k]->memory_image();
    local.upsert_foodtag({s.food_tags[k].tag_id, food[k]->dump()});
  }
  for (const auto& plan : plans) {
    result.final_positions[plan.cart] = plan.position(s.duration);
    const auto& cs = carts.at(plan.cart);
    result.last_read_delivered[plan.cart] = cs.read_seq > 0 && cs.delivered_seq == cs.read_seq;
  }
  return result;
}

backend::StoreDatabase seed_database(const Scenario& s) {
  const auto store_id = s.store.store_id;
  backend::StoreDatabase db;
  db.set_checkout_overhead(s.checkout_overhead);
  db.upsert_store({store_id, s.store.name, s.store.lat, s.store.lon, backend::TrafficStatus::kLow, 0});
  std::set<LocationId> seen_locations;
  for (const auto& [id, p] : s.tags.entries()) {
    if (seen_locations.insert(p.location_id).second) {
      db.upsert_location({p.location_id, store_id, "loc-" + std::to_string(p.location_id),
                          p.position.x, p.position.y});
    }
    db.upsert_mapping({store_id, id, p.location_id, p.position.x, p.position.y});
  }
  for (const auto& p : s.products) {
    db.upsert_product({p.product_id, p.name});
    db.upsert_inventory({store_id, p.product_id, p.count, p.location_id, s.epoch});
  }
  for (const auto& c : s.carts) db.register_cart(store_id, c.cart_id);
  for (const auto& l : s.lanes) db.upsert_lane({store_id, l.lane_id, l.queue});
  return db;
}

std::vector<CartTruth> ground_truth(const Scenario& s, double time) {
  if (!(time >= 0.0 && time <= s.duration)) {
    throw Error(ErrorCode::kArgument, "time must lie within the scenario duration");
  }
  std::vector<CartTruth> out;
  for (const auto& plan : make_plans(s)) {
    CartTruth truth{plan.cart, plan.position(time), std::nullopt, std::nullopt};
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [id, placement] : s.tags.entries()) {
      const double d = std::hypot(placement.position.x - truth.position.x,
                                  placement.position.y - truth.position.y);
      // Entries iterate by ascending id, so strict < keeps the smaller id on ties.
      if (d <= s.read_range && d < best) {
        best = d;
        truth.tag_id = id;
        truth.location = placement.location_id;
      }
    }
    out.push_back(std::move(truth));
  }
  return out;
}

namespace {

std::string format_time(double t) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9f", t);
  return buf;
}

json event_fields(const Scenario& s, const EventPayload& payload) {
  struct Fields {
    const Scenario& s;
    json operator()(const TagRead& e) const {
      return {{"cart", e.cart}, {"tag", wiegand::payload_to_tag_id(e.payload)}};
    }
    json operator()(const PacketSent& e) const {
      const auto tag = wiegand::payload_to_tag_id(e.payload);
      return {{"cart", e.cart},
              {"tag", tag},
              {"packet", cartlink::packet_to_hex({s.store.store_id, e.cart, tag})},
              {"window", e.window},
              {"retry", e.retry},
              {"read_time", format_time(e.read_time)}};
    }
    json operator()(const Collision& e) const {
      return {{"cart", e.cart}, {"other", e.other}, {"window", e.window}};
    }
    json operator()(const Retry& e) const { return {{"cart", e.cart}, {"window", e.window}}; }
    json operator()(const DbUpsert& e) const {
      return {{"cart", e.cart},
              {"tag", wiegand::payload_to_tag_id(e.payload)},
              {"location", e.location},
              {"updated_at", format_iso8601(e.updated_at)},
              {"window", e.window}};
    }
    json operator()(const LaneJoin& e) const {
      return {{"cart", e.cart}, {"lane", e.lane}, {"items", e.items}};
    }
    json operator()(const LaneServe& e) const { return {{"lane", e.lane}, {"items", e.items}}; }
    json operator()(const Pick& e) const {
      return {{"cart", e.cart}, {"product", e.product}, {"remaining", e.remaining}};
    }
    json operator()(const SensorSample& e) const {
      return {{"food_tag", s.food_tags.at(e.food_tag).tag_id},
              {"temp_raw", e.temp_raw},
              {"hum_raw", e.hum_raw},
              {"logged", e.logged}};
    }
    json operator()(const PlantMark& e) const {
      return {{"food_tag", s.food_tags.at(e.food_tag).tag_id},
              {"plant", e.plant_id},
              {"event", foodtrack::to_string(e.kind)}};
    }
    json operator()(const SyncPush& e) const { return {{"changed", e.changed}}; }
  };
  return std::visit(Fields{s}, payload);
}

template <typename Fn>
void for_each_jsonl_line(const Scenario& s, const std::vector<Event>& events, Fn&& fn) {
  std::string line;
  for (const auto& e : events) {
    const auto fields = event_fields(s, e.payload).dump();
    line = "{\"t\":";
    line += format_time(e.time);
    line += ",\"kind\":\"";
    line += kind_name(e.payload);
    line += '"';
    if (fields.size() > 2) {
      line += ',';
      line.append(fields, 1, fields.size() - 2);
    }
    line += "}\n";
    fn(line);
  }
}

}  // namespace

std::string events_to_jsonl(const Scenario& s, const std::vector<Event>& events) {
  std::string out;
  for_each_jsonl_line(s, events, [&out](const std::string& line) { out += line; });
  return out;
}

std::string events_to_csv(const Scenario& s, const std::vector<Event>& events) {
  std::string out = "time,kind,details\n";
  for (const auto& e : events) {
    out += format_time(e.time);
    out += ',';
    out += kind_name(e.payload);
    out += ',';
    bool first = true;
    const json fields = event_fields(s, e.payload);
    for (const auto& [key, value] : fields.items()) {
      if (!first) out += ';';
      first = false;
      out += key;
      out += '=';
      out += value.is_string() ? value.get<std::string>() : value.dump();
    }
    out += '\n';
  }
  return out;
}

json final_state_json(const SimulationResult& r) {
  json j;
  const auto store = r.local.stores().begin()->first;
  j["carts"] = r.local.cart_locations(store);
  j["lanes"] = r.local.lanes(store);
  j["inventory"] = r.local.inventory(store);
  j["main_carts"] = r.main.cart_locations(store);
  json tags = json::object();
  for (const auto& [id, image] : r.food_tag_images) tags[id] = to_hex(image);
  j["food_tags"] = tags;
  return j;
}

std::string digest(const Scenario& s, const SimulationResult& r) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto feed = [&h](std::string_view bytes) {
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
  };
  for_each_jsonl_line(s, r.events, feed);
  feed(final_state_json(r).dump());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

}  // namespace sysmart::sim
