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

// Command-line entry point: codecs, emulated food tags, the simulator and the
// backend server.
//
// Exit codes: 0 success, 2 invalid input, 3 state or tamper violation,
// 4 not found, 1 anything else.

#include <CLI11.hpp>
#include <httplib.h>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <thread>

#include "sysmart/cartlink.hpp"
#include "sysmart/foodtrack.hpp"
#include "sysmart/http_server.hpp"
#include "sysmart/json_codec.hpp"
#include "sysmart/service.hpp"
#include "sysmart/simulator.hpp"
#include "sysmart/timefmt.hpp"
#include "sysmart/wiegand.hpp"

namespace {

using namespace sysmart;
using nlohmann::json;

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kRange:
    case ErrorCode::kFraming:
    case ErrorCode::kParity:
    case ErrorCode::kTruncation:
    case ErrorCode::kFormat:
    case ErrorCode::kArgument:
    case ErrorCode::kValidation:
    case ErrorCode::kRouting:
      return 2;
    case ErrorCode::kState:
    case ErrorCode::kTamper:
    case ErrorCode::kCapacity:
    case ErrorCode::kClock:
    case ErrorCode::kAuthentication:
    case ErrorCode::kTransition:
      return 3;
    case ErrorCode::kLookup:
    case ErrorCode::kReference:
      return 4;
    case ErrorCode::kIo:
      return 1;
  }
  return 1;
}

bool g_json = false;

void print(const json& machine, const std::string& human) {
  if (g_json) {
    std::cout << machine.dump() << '\n';
  } else {
    std::cout << human << '\n';
  }
}

std::string default_addr() {
  const char* env = std::getenv("SYSMART_ADDR");
  return env && *env ? env : "127.0.0.1:8080";
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  write_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::uint32_t parse_payload(const std::string& text) {
  std::string digits = text;
  int base = 10;
  if (digits.starts_with("0x") || digits.starts_with("0X")) {
    digits = digits.substr(2);
    base = 16;
  }
  if (digits.empty()) throw Error(ErrorCode::kFormat, "empty payload");
  std::size_t used = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(digits, &used, base);
  } catch (const std::exception&) {
    throw Error(ErrorCode::kFormat, "payload '" + text + "' is not a number");
  }
  if (used != digits.size()) throw Error(ErrorCode::kFormat, "payload '" + text + "' is not a number");
  if (value >= wiegand::kPayloadLimit) throw Error(ErrorCode::kRange, "payload exceeds 24 bits");
  return static_cast<std::uint32_t>(value);
}

// ---- HTTP client helpers ----

struct Response {
  int status;
  json body;
};

Response http_call(const std::string& addr, const std::string& method, const std::string& path,
                   const std::string& body = "") {
  const auto [host, port] = api::parse_address(addr);
  httplib::Client client(host, port);
  client.set_connection_timeout(5);
  httplib::Result res = method == "GET" ? client.Get(path)
                                        : client.Post(path, body, "application/json");
  if (!res) {
    throw Error(ErrorCode::kIo, "cannot reach " + addr + ": " + httplib::to_string(res.error()));
  }
  json parsed;
  try {
    parsed = json::parse(res->body);
  } catch (const json::parse_error&) {
    parsed = res->body;
  }
  if (res->status >= 400) {
    const auto category = parsed.is_object() ? parsed.value("error", "") : "";
    const auto message = parsed.is_object() ? parsed.value("message", res->body) : res->body;
    const auto code = parse_error_code(category).value_or(ErrorCode::kIo);
    // The server's message already carries the category prefix.
    throw Error(code, "server: " + message);
  }
  return {res->status, parsed};
}

// ---- tag file helpers ----

struct TagFile {
  std::filesystem::path path;
  foodtrack::ManualRtc rtc;

  foodtrack::FoodTag load() const {
    return foodtrack::FoodTag::from_memory_image(read_file(path), rtc);
  }
  void save(const foodtrack::FoodTag& tag) const { write_file(path, tag.memory_image()); }
};

foodtrack::UnixSeconds parse_rtc(const std::string& text) {
  if (text.empty()) {
    return static_cast<foodtrack::UnixSeconds>(
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count());
  }
  const auto t = parse_iso8601(text);
  if (t < 0 || t > UINT32_MAX) throw Error(ErrorCode::kRange, "time outside the tag clock range");
  return static_cast<foodtrack::UnixSeconds>(t);
}

std::string summary_text(const foodtrack::TagSummary& s) {
  auto date = [](const auto& v) { return v ? format_iso8601(static_cast<std::int64_t>(*v)) : std::string("unset"); };
  char buf[64];
  std::string out;
  out += "production_date   " + date(s.production_date) + "\n";
  out += "expiry_date       " + date(s.expiry_date) + "\n";
  if (s.max_temp_c) {
    std::snprintf(buf, sizeof buf, "%.2f C", *s.max_temp_c);
    out += "max_temp          " + std::string(buf) + "\n";
    std::snprintf(buf, sizeof buf, "%.2f C", *s.avg_temp_c);
    out += "avg_temp          " + std::string(buf) + "\n";
  }
  out += "estimated_expiry  " + date(s.estimated_expiry) + "\n";
  out += "log_count         " + std::to_string(s.log_count) + (s.overflow ? " (overflow)" : "") + "\n";
  for (const auto& e : s.plant_events) {
    out += "plant " + std::to_string(e.plant_id) + " " + std::string(foodtrack::to_string(e.kind)) +
           " " + format_iso8601(e.timestamp) + "\n";
  }
  out.pop_back();
  return out;
}

// ---- serve ----

volatile std::sig_atomic_t g_stop_requested = 0;

extern "C" void handle_stop_signal(int) { g_stop_requested = 1; }

struct ServeOptions {
  std::string addr;
  std::string journal;
  std::string scenario;
  bool simulate = false;
  std::string push_to;
  double sync_period = 5.0;
  std::optional<double> checkout_overhead;
};

int serve(const ServeOptions& o) {
  std::vector<backend::Change> history;
  if (!o.journal.empty()) history = backend::FileJournal::load(o.journal);
  backend::StoreDatabase db = backend::replay(history);

  if (history.empty() && !o.scenario.empty()) {
    const auto scenario = sim::load_scenario(o.scenario);
    const backend::StoreDatabase seeded =
        o.simulate ? sim::run(scenario).local : sim::seed_database(scenario);
    const auto seed_changes = seeded.changes();
    db = backend::replay(seed_changes);
    if (!o.journal.empty()) backend::FileJournal(o.journal).append(seed_changes);
  }
  double overhead = o.checkout_overhead.value_or(0.0);
  if (!o.checkout_overhead && !o.scenario.empty()) {
    overhead = sim::load_scenario(o.scenario).checkout_overhead;
  }
  db.set_checkout_overhead(overhead);

  std::shared_ptr<backend::Journal> journal;
  if (!o.journal.empty()) journal = std::make_shared<backend::FileJournal>(o.journal);
  backend::Service service(std::move(db), journal);
  api::ApiServer server(service);
  const auto [host, port] = api::parse_address(o.addr);
  const int bound = server.bind(host, port);
  std::cerr << "listening on " << host << ":" << bound << std::endl;

  std::atomic<bool> stopping{false};
  std::thread pusher;
  if (!o.push_to.empty()) {
    pusher = std::thread([&] {
      const auto period = std::chrono::duration<double>(o.sync_period);
      auto next = std::chrono::steady_clock::now() + period;
      while (!stopping) {
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
        if (std::chrono::steady_clock::now() < next) continue;
        next += std::chrono::duration_cast<std::chrono::steady_clock::duration>(period);
        const auto snap = service.snapshot();
        for (const auto& [store_id, store] : snap->stores()) {
          try {
            http_call(o.push_to, "POST", "/v1/sync", json(snap->snapshot(store_id)).dump());
          } catch (const Error& e) {
            std::cerr << "sync to " << o.push_to << " failed: " << e.what() << std::endl;
          }
        }
      }
    });
  }

  std::signal(SIGINT, handle_stop_signal);
  std::signal(SIGTERM, handle_stop_signal);
  std::thread watcher([&] {
    while (!g_stop_requested && !stopping) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    server.stop();
  });
  server.listen();
  stopping = true;
  watcher.join();
  if (pusher.joinable()) pusher.join();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SysMART smart-store toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--json", g_json, "Machine-readable output");

  std::function<int()> action;

  // ---- serve ----
  ServeOptions serve_opts;
  serve_opts.addr = default_addr();
  auto* serve_cmd = app.add_subcommand("serve", "Run the backend HTTP server");
  serve_cmd->add_option("--addr", serve_opts.addr, "host:port to listen on")->capture_default_str();
  serve_cmd->add_option("--journal", serve_opts.journal, "Append-only journal file (replayed at start)");
  serve_cmd->add_option("--scenario", serve_opts.scenario, "Seed an empty server from a scenario file");
  serve_cmd->add_flag("--simulate", serve_opts.simulate, "Seed with the scenario's simulated end state");
  serve_cmd->add_option("--push-to", serve_opts.push_to, "Main server to push snapshots to");
  serve_cmd->add_option("--sync-period", serve_opts.sync_period, "Seconds between pushes")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  serve_cmd->add_option("--checkout-overhead", serve_opts.checkout_overhead,
                        "Per-customer lane overhead in items");
  serve_cmd->callback([&] { action = [&] { return serve(serve_opts); }; });

  // ---- simulate ----
  std::string sim_scenario;
  std::optional<std::uint64_t> sim_seed;
  std::string sim_out;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a scenario and report its digest");
  sim_cmd->add_option("--scenario", sim_scenario, "Scenario JSON file")->required();
  sim_cmd->add_option("--seed", sim_seed, "Override the scenario seed");
  sim_cmd->add_option("--out", sim_out, "Directory for events.jsonl, events.csv and final_state.json");
  sim_cmd->callback([&] {
    action = [&] {
      auto scenario = sim::load_scenario(sim_scenario);
      if (sim_seed) scenario.seed = *sim_seed;
      const auto start = std::chrono::steady_clock::now();
      const auto result = sim::run(scenario);
      const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::uint64_t collisions = 0;
      for (const auto& w : result.windows) collisions += w.colliding_pairs;
      const auto digest = sim::digest(scenario, result);
      if (!sim_out.empty()) {
        std::filesystem::create_directories(sim_out);
        write_file(std::filesystem::path(sim_out) / "events.jsonl", sim::events_to_jsonl(scenario, result.events));
        write_file(std::filesystem::path(sim_out) / "events.csv", sim::events_to_csv(scenario, result.events));
        write_file(std::filesystem::path(sim_out) / "final_state.json",
                   sim::final_state_json(result).dump(2) + "\n");
      }
      json out = {{"digest", digest},
                  {"seed", scenario.seed},
                  {"events", result.events.size()},
                  {"windows", result.windows.size()},
                  {"colliding_pairs", collisions},
                  {"wall_seconds", wall}};
      char buf[160];
      std::snprintf(buf, sizeof buf, "digest %s  seed %llu  events %zu  colliding pairs %llu  (%.2f s)",
                    digest.c_str(), static_cast<unsigned long long>(scenario.seed), result.events.size(),
                    static_cast<unsigned long long>(collisions), wall);
      print(out, buf);
      return 0;
    };
  });

  // ---- scenario ----
  auto* scen_cmd = app.add_subcommand("scenario", "Generate or check scenario files");
  scen_cmd->require_subcommand(1);
  std::uint64_t case_seed = 7;
  std::string case_out;
  auto* case_cmd = scen_cmd->add_subcommand("case-study", "Write the 150-cart, 230-tag store");
  case_cmd->add_option("--seed", case_seed)->capture_default_str();
  case_cmd->add_option("--out", case_out, "Output file (default stdout)");
  case_cmd->callback([&] {
    action = [&] {
      const auto text = sim::scenario_to_json(sim::make_case_study_scenario(case_seed)).dump(1) + "\n";
      if (case_out.empty()) {
        std::cout << text;
      } else {
        write_file(case_out, text);
      }
      return 0;
    };
  });
  std::string check_path;
  auto* check_cmd = scen_cmd->add_subcommand("validate", "Check a scenario file");
  check_cmd->add_option("file", check_path)->required();
  check_cmd->callback([&] {
    action = [&] {
      const auto s = sim::load_scenario(check_path);
      print({{"valid", true}, {"carts", s.carts.size()}, {"tags", s.tags.size()}},
            "ok: " + std::to_string(s.carts.size()) + " carts, " + std::to_string(s.tags.size()) + " tags");
      return 0;
    };
  });

  // ---- wiegand ----
  auto* wg_cmd = app.add_subcommand("wiegand", "Wiegand 26 frames");
  wg_cmd->require_subcommand(1);
  std::string wg_in;
  auto* wg_enc = wg_cmd->add_subcommand("encode", "Payload (0x-hex or decimal) to a 26-bit string");
  wg_enc->add_option("payload", wg_in)->required();
  wg_enc->callback([&] {
    action = [&] {
      const auto payload = parse_payload(wg_in);
      const auto frame = wiegand::encode_frame(payload);
      const auto bits = wiegand::to_bit_string(wiegand::frame_bits(frame));
      print({{"tag_id", wiegand::payload_to_tag_id(payload)}, {"bits", bits}}, bits);
      return 0;
    };
  });
  auto* wg_dec = wg_cmd->add_subcommand("decode", "26-bit string to a tag id");
  wg_dec->add_option("bits", wg_in)->required();
  wg_dec->callback([&] {
    action = [&] {
      const auto payload = wiegand::decode_frame(wiegand::parse_bit_string(wg_in));
      const auto id = wiegand::payload_to_tag_id(payload);
      print({{"tag_id", id}, {"payload", payload}}, id);
      return 0;
    };
  });

  // ---- packet ----
  auto* pk_cmd = app.add_subcommand("packet", "Cart position packets");
  pk_cmd->require_subcommand(1);
  cartlink::CartPositionPacket pk;
  auto* pk_enc = pk_cmd->add_subcommand("encode", "Fields to 20 hex characters");
  pk_enc->add_option("--store", pk.store_id)->required();
  pk_enc->add_option("--cart", pk.cart_id)->required();
  pk_enc->add_option("--tag", pk.tag_id, "Six uppercase hex digits")->required();
  pk_enc->callback([&] {
    action = [&] {
      const auto hex = cartlink::packet_to_hex(pk);
      print({{"packet_hex", hex}, {"bits", cartlink::kPacketBits}}, hex);
      return 0;
    };
  });
  std::string pk_hex;
  auto* pk_dec = pk_cmd->add_subcommand("decode", "20 hex characters to fields");
  pk_dec->add_option("hex", pk_hex)->required();
  pk_dec->callback([&] {
    action = [&] {
      const auto p = cartlink::packet_from_hex(pk_hex);
      print({{"store_id", p.store_id}, {"cart_id", p.cart_id}, {"tag_id", p.tag_id}},
            "store " + std::to_string(p.store_id) + " cart " + std::to_string(p.cart_id) + " tag " + p.tag_id);
      return 0;
    };
  });

  // ---- tag ----
  auto* tag_cmd = app.add_subcommand("tag", "Emulated food tag stored in a memory file");
  tag_cmd->require_subcommand(1);
  std::string tag_path;
  std::string rtc_text;
  auto tag_common = [&](CLI::App* cmd) {
    cmd->add_option("--file", tag_path, "Tag memory file")->required();
    cmd->add_option("--rtc", rtc_text, "Tag clock, ISO-8601 UTC (default: now)");
  };
  auto tag_file = [&] { return TagFile{tag_path, foodtrack::ManualRtc(parse_rtc(rtc_text))}; };

  foodtrack::TagConfig init_cfg;
  std::string init_prod, init_exp;
  std::size_t init_octets = foodtrack::kDefaultLogRegionOctets;
  bool init_force = false;
  auto* tag_init = tag_cmd->add_subcommand("init", "Create and initialize a tag");
  tag_common(tag_init);
  tag_init->add_option("--password", init_cfg.password, "Exactly 20 printable ASCII characters")->required();
  tag_init->add_option("--production-date", init_prod);
  tag_init->add_option("--expiry-date", init_exp);
  tag_init->add_option("--temp-threshold", init_cfg.thresholds.temp_raw, "Raw units")->capture_default_str();
  tag_init->add_option("--hum-threshold", init_cfg.thresholds.hum_raw, "Raw units")->capture_default_str();
  tag_init->add_option("--interval", init_cfg.sample_interval_minutes, "Sample interval, minutes")
      ->capture_default_str();
  tag_init->add_option("--log-octets", init_octets, "Log region size")->capture_default_str();
  tag_init->add_flag("--force", init_force, "Replace an existing file");
  tag_init->callback([&] {
    action = [&] {
      auto tf = tag_file();
      if (!init_prod.empty()) init_cfg.production_date = parse_rtc(init_prod);
      if (!init_exp.empty()) init_cfg.expiry_date = parse_rtc(init_exp);
      // An existing tag decides for itself whether it may be initialized.
      auto tag = std::filesystem::exists(tf.path) && !init_force ? tf.load()
                                                                 : foodtrack::FoodTag(tf.rtc, init_octets);
      tag.init(init_cfg);
      tf.save(tag);
      print({{"initialized", true}, {"file", tag_path}}, "initialized " + tag_path);
      return 0;
    };
  });

  std::string set_field, set_value;
  auto* tag_set = tag_cmd->add_subcommand("set", "Write a write-once date field");
  tag_common(tag_set);
  tag_set->add_option("--field", set_field, "production_date or expiry_date")->required();
  tag_set->add_option("--value", set_value, "ISO-8601 UTC")->required();
  tag_set->callback([&] {
    action = [&] {
      auto tf = tag_file();
      auto tag = tf.load();
      tag.set_field(set_field, parse_rtc(set_value));
      tf.save(tag);
      print({{"field", set_field}, {"value", set_value}}, set_field + " = " + set_value);
      return 0;
    };
  });

  std::uint16_t ev_plant = 0;
  std::string ev_kind;
  auto* tag_event = tag_cmd->add_subcommand("event", "Record a plant arrival or departure");
  tag_common(tag_event);
  tag_event->add_option("--plant", ev_plant)->required();
  tag_event->add_option("--kind", ev_kind, "arrival or departure")->required();
  tag_event->callback([&] {
    action = [&] {
      auto tf = tag_file();
      auto tag = tf.load();
      tag.record_plant_event(ev_plant, foodtrack::parse_plant_event_kind(ev_kind));
      tf.save(tag);
      print({{"plant_events", tag.plant_events().size()}},
            "recorded " + ev_kind + " at plant " + std::to_string(ev_plant));
      return 0;
    };
  });

  std::optional<double> sm_temp, sm_rh;
  std::optional<std::uint16_t> sm_temp_raw, sm_hum_raw;
  auto* tag_sample = tag_cmd->add_subcommand("sample", "Feed one sensor reading");
  tag_common(tag_sample);
  auto* t_c = tag_sample->add_option("--temp", sm_temp, "Degrees C");
  auto* t_r = tag_sample->add_option("--temp-raw", sm_temp_raw, "Raw 12-bit value");
  auto* h_c = tag_sample->add_option("--rh", sm_rh, "Percent relative humidity");
  auto* h_r = tag_sample->add_option("--hum-raw", sm_hum_raw, "Raw 14-bit value");
  t_c->excludes(t_r);
  h_c->excludes(h_r);
  tag_sample->callback([&] {
    action = [&] {
      if (!sm_temp && !sm_temp_raw) throw Error(ErrorCode::kArgument, "give --temp or --temp-raw");
      if (!sm_rh && !sm_hum_raw) throw Error(ErrorCode::kArgument, "give --rh or --hum-raw");
      const std::uint16_t t = sm_temp_raw ? *sm_temp_raw : foodtrack::celsius_to_raw(*sm_temp);
      const std::uint16_t h = sm_hum_raw ? *sm_hum_raw : foodtrack::rh_to_raw(*sm_rh);
      auto tf = tag_file();
      auto tag = tf.load();
      const bool logged = tag.sample(t, h);
      tf.save(tag);
      print({{"logged", logged}, {"temp_raw", t}, {"hum_raw", h}, {"log_count", tag.log_count()}},
            logged ? "logged (" + std::to_string(tag.log_count()) + " records)" : "not logged");
      return 0;
    };
  });

  auto* tag_summary = tag_cmd->add_subcommand("summary", "Print the summary block");
  tag_common(tag_summary);
  tag_summary->callback([&] {
    action = [&] {
      const auto tag = tag_file().load();
      const auto s = tag.read_summary();
      print(foodtrack::summary_to_json(s), summary_text(s));
      return 0;
    };
  });

  std::string log_format = "csv";
  auto* tag_log = tag_cmd->add_subcommand("log", "Print decoded log records");
  tag_common(tag_log);
  tag_log->add_option("--format", log_format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  tag_log->callback([&] {
    action = [&] {
      const auto tag = tag_file().load();
      if (g_json || log_format == "json") {
        std::cout << foodtrack::log_to_json(tag).dump() << '\n';
      } else {
        std::cout << foodtrack::log_to_csv(tag);
      }
      return 0;
    };
  });

  std::string reset_password;
  auto* tag_reset = tag_cmd->add_subcommand("reset", "Wipe the tag (password required)");
  tag_common(tag_reset);
  tag_reset->add_option("--password", reset_password)->required();
  tag_reset->callback([&] {
    action = [&] {
      auto tf = tag_file();
      auto tag = tf.load();
      tag.reset(reset_password);
      tf.save(tag);
      print({{"reset", true}}, "tag reset");
      return 0;
    };
  });

  std::string dump_out;
  auto* tag_dump = tag_cmd->add_subcommand("dump", "Reader-visible memory: hex, or raw bytes with --out");
  tag_common(tag_dump);
  tag_dump->add_option("--out", dump_out, "Write the raw dump to this file");
  tag_dump->callback([&] {
    action = [&] {
      const auto dump = tag_file().load().dump();
      if (!dump_out.empty()) {
        write_file(dump_out, dump);
        print({{"octets", dump.size()}, {"file", dump_out}}, "wrote " + std::to_string(dump.size()) + " octets");
      } else {
        print({{"octets", dump.size()}, {"dump_hex", to_hex(dump)}}, to_hex(dump));
      }
      return 0;
    };
  });

  // ---- lanes / branches (HTTP clients) ----
  std::string client_addr = default_addr();
  unsigned store_id = 1;
  int items = 0;
  auto* lanes_cmd = app.add_subcommand("lanes", "Checkout lanes");
  lanes_cmd->require_subcommand(1);
  auto* fastest_cmd = lanes_cmd->add_subcommand("fastest", "Ask the server for the fastest lane");
  fastest_cmd->add_option("--addr", client_addr, "Server (default $SYSMART_ADDR)")->capture_default_str();
  fastest_cmd->add_option("--store", store_id)->required();
  fastest_cmd->add_option("--items", items)->required();
  fastest_cmd->callback([&] {
    action = [&] {
      const auto r = http_call(client_addr, "GET", "/v1/stores/" + std::to_string(store_id) +
                                                       "/lanes/fastest?items=" + std::to_string(items));
      print(r.body, "lane " + r.body.at("lane_id").dump());
      return 0;
    };
  });

  unsigned product_id = 0;
  auto* branches_cmd = app.add_subcommand("branches", "Other stores stocking a product, nearest first");
  branches_cmd->add_option("--addr", client_addr, "Server (default $SYSMART_ADDR)")->capture_default_str();
  branches_cmd->add_option("--product", product_id)->required();
  branches_cmd->add_option("--origin", store_id, "Store to measure from")->required();
  branches_cmd->callback([&] {
    action = [&] {
      const auto r = http_call(client_addr, "GET", "/v1/products/" + std::to_string(product_id) +
                                                       "/branches?origin=" + std::to_string(store_id));
      std::string text;
      for (const auto& b : r.body) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "store %s  count %s  %.3f km\n", b.at("store_id").dump().c_str(),
                      b.at("count").dump().c_str(), b.at("distance_km").get<double>());
        text += buf;
      }
      if (text.empty()) text = "no other store has it\n";
      text.pop_back();
      print(r.body, text);
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    return action ? action() : 0;
  } catch (const Error& e) {
    if (g_json) {
      std::cout << json{{"error", to_string(e.code())}, {"message", e.what()}}.dump() << '\n';
    }
    std::cerr << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
