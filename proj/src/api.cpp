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

#include "sysmart/api.hpp"

#include <charconv>
#include <optional>
#include <vector>

#include "sysmart/foodtrack.hpp"
#include "sysmart/json_codec.hpp"

namespace sysmart::api {
namespace {

using backend::Service;
using backend::StoreDatabase;
using backend::TicketKind;
using nlohmann::json;

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    const auto slash = path.find('/', start);
    const auto end = slash == std::string::npos ? path.size() : slash;
    if (end > start) parts.push_back(path.substr(start, end - start));
    if (slash == std::string::npos) break;
    start = slash + 1;
  }
  return parts;
}

template <typename T>
T parse_id(const std::string& text, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kValidation, std::string(what) + " must be a non-negative integer");
  }
  return value;
}

ApiResponse ok(const json& body, int status = 200) { return {status, body.dump(), "application/json"}; }

json parse_body(const ApiRequest& req) {
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kFormat, std::string("request body is not JSON: ") + e.what());
  }
}

const std::string* query(const ApiRequest& req, const std::string& key) {
  auto it = req.query.find(key);
  return it == req.query.end() ? nullptr : &it->second;
}

bool valid_foodtag_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') return false;
  }
  return true;
}

ApiResponse post_position(Service& svc, const ApiRequest& req) {
  const json body = parse_body(req);
  cartlink::CartPositionPacket packet;
  if (body.contains("packet_hex")) {
    packet = cartlink::packet_from_hex(json_field<std::string>(body, "packet_hex"));
  } else {
    packet.store_id = json_field<backend::StoreId>(body, "store_id");
    packet.cart_id = json_field<backend::CartId>(body, "cart_id");
    packet.tag_id = json_field<std::string>(body, "tag_id");
    cartlink::encode_packet(packet);  // validates the tag id
  }
  const auto now = svc.now();
  const auto row = svc.write([&](StoreDatabase& db) { return db.ingest_position(packet, now); });
  return ok(row);
}

ApiResponse ticket_transition(Service& svc, TicketKind kind, backend::TicketId id,
                              const std::string& action) {
  const auto now = svc.now();
  if (action == "ack") {
    return ok(svc.write([&](StoreDatabase& db) { return db.acknowledge(kind, id, now); }));
  }
  return ok(svc.write([&](StoreDatabase& db) { return db.resolve(kind, id, now); }));
}

ApiResponse foodtag_view(const StoreDatabase& db, const std::string& tid, const std::string& view,
                         const ApiRequest& req) {
  const auto& record = db.foodtag(tid);
  const foodtrack::ManualRtc rtc;
  const auto tag = foodtrack::FoodTag::from_dump(record.dump, rtc);
  if (view == "summary") return ok(foodtrack::summary_to_json(tag.read_summary()));
  const auto* format = query(req, "format");
  if (!format || *format == "json") return ok(foodtrack::log_to_json(tag));
  if (*format == "csv") return {200, foodtrack::log_to_csv(tag), "text/csv"};
  throw Error(ErrorCode::kValidation, "format must be json or csv");
}

ApiResponse put_foodtag(Service& svc, const std::string& tid, const ApiRequest& req) {
  if (!valid_foodtag_id(tid)) {
    throw Error(ErrorCode::kValidation, "food tag id must be 1-64 characters of [A-Za-z0-9_-]");
  }
  backend::FoodTagRecord record{tid, {}};
  if (req.content_type.starts_with("application/json")) {
    record.dump = from_hex(json_field<std::string>(parse_body(req), "dump_hex"));
  } else {
    record.dump.assign(req.body.begin(), req.body.end());
  }
  // Reject anything a reader could not parse.
  const foodtrack::ManualRtc rtc;
  foodtrack::FoodTag::from_dump(record.dump, rtc);
  svc.write([&](StoreDatabase& db) { db.upsert_foodtag(record); });
  return ok(json{{"tag_id", tid}, {"octets", record.dump.size()}}, 201);
}

ApiResponse route(Service& svc, const ApiRequest& req) {
  const auto p = split_path(req.path);
  const auto& m = req.method;
  const auto n = p.size();
  if (n < 2 || p[0] != "v1") throw Error(ErrorCode::kReference, "no such endpoint");

  if (m == "POST" && n == 2 && p[1] == "positions") return post_position(svc, req);

  if (m == "POST" && n == 2 && p[1] == "sync") {
    const auto snap = parse_body(req).get<backend::Snapshot>();
    const auto changed = svc.write([&](StoreDatabase& db) { return db.sync_push(snap); });
    return ok(json{{"applied", changed}});
  }

  if (p[1] == "stores" && n >= 4) {
    const auto sid = parse_id<backend::StoreId>(p[2], "store id");
    const auto& what = p[3];
    if (m == "GET" && n == 4 && what == "carts") {
      return ok(svc.snapshot()->cart_locations(sid));
    }
    if (m == "GET" && n == 4 && what == "snapshot") return ok(svc.snapshot()->snapshot(sid));
    if (m == "GET" && n == 4 && what == "lanes") return ok(svc.snapshot()->lanes(sid));
    if (m == "GET" && n == 5 && what == "lanes" && p[4] == "fastest") {
      const auto* items = query(req, "items");
      if (!items) throw Error(ErrorCode::kValidation, "items query parameter is required");
      int count = 0;
      const auto [ptr, ec] = std::from_chars(items->data(), items->data() + items->size(), count);
      if (ec != std::errc{} || ptr != items->data() + items->size()) {
        throw Error(ErrorCode::kValidation, "items must be an integer");
      }
      return ok(json{{"lane_id", svc.snapshot()->fastest_lane(sid, count)}});
    }
    if (m == "GET" && n == 5 && what == "products") {
      const auto pid = parse_id<backend::ProductId>(p[4], "product id");
      return ok(svc.snapshot()->find_item(sid, pid));
    }
    if (m == "POST" && n == 6 && what == "carts" && (p[5] == "assistance" || p[5] == "malfunction")) {
      const auto cid = parse_id<backend::CartId>(p[4], "cart id");
      const auto kind = backend::parse_ticket_kind(p[5]);
      const auto now = svc.now();
      return ok(svc.write([&](StoreDatabase& db) { return db.open_ticket(kind, sid, cid, now); }),
                201);
    }
    if (m == "GET" && n == 4 && (what == "assistance" || what == "malfunction")) {
      std::optional<backend::TicketStatus> status;
      if (const auto* s = query(req, "status")) status = backend::parse_ticket_status(*s);
      return ok(svc.snapshot()->tickets(sid, backend::parse_ticket_kind(what), status));
    }
  }

  if (m == "GET" && n == 4 && p[1] == "products" && p[3] == "branches") {
    const auto pid = parse_id<backend::ProductId>(p[2], "product id");
    const auto* origin = query(req, "origin");
    if (!origin) throw Error(ErrorCode::kValidation, "origin query parameter is required");
    return ok(svc.snapshot()->alternative_branches(pid, parse_id<backend::StoreId>(*origin, "origin")));
  }

  if (m == "POST" && n == 4 && (p[1] == "assistance" || p[1] == "malfunction") &&
      (p[3] == "ack" || p[3] == "resolve")) {
    return ticket_transition(svc, backend::parse_ticket_kind(p[1]),
                             parse_id<backend::TicketId>(p[2], "ticket id"), p[3]);
  }

  if (p[1] == "foodtags") {
    if (m == "GET" && n == 2) return ok(svc.snapshot()->foodtag_ids());
    if (m == "PUT" && n == 3) return put_foodtag(svc, p[2], req);
    if (m == "GET" && n == 4 && (p[3] == "summary" || p[3] == "log")) {
      return foodtag_view(*svc.snapshot(), p[2], p[3], req);
    }
  }

  throw Error(ErrorCode::kReference, "no such endpoint: " + m + " " + req.path);
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kReference:
    case ErrorCode::kLookup:
      return 404;
    case ErrorCode::kState:
    case ErrorCode::kTransition:
    case ErrorCode::kTamper:
    case ErrorCode::kCapacity:
      return 409;
    case ErrorCode::kIo:
      return 500;
    default:
      return 422;
  }
}

ApiResponse Api::handle(const ApiRequest& request) {
  try {
    return route(service_, request);
  } catch (const Error& e) {
    int status = http_status(e.code());
    if (e.code() == ErrorCode::kFormat && std::string_view(e.what()).find("not JSON") != std::string_view::npos) {
      status = 400;
    }
    return {status, json{{"error", to_string(e.code())}, {"message", e.what()}}.dump(),
            "application/json"};
  } catch (const std::exception& e) {
    return {500, json{{"error", "internal"}, {"message", e.what()}}.dump(), "application/json"};
  }
}

}  // namespace sysmart::api
