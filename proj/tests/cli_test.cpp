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

#include <gtest/gtest.h>

#include <httplib.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <thread>

#include "sysmart/json_codec.hpp"
#include "sysmart/simulator.hpp"

#ifndef SYSMART_CLI
#define SYSMART_CLI "sysmart"
#endif
#ifndef SYSMART_SOURCE_DIR
#define SYSMART_SOURCE_DIR "."
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  int status = -1;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sysmart_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  Outcome run(const std::string& args) {
    const auto out = dir_ / "stdout";
    const auto err = dir_ / "stderr";
    const std::string cmd = std::string("'") + SYSMART_CLI + "' " + args + " >'" + out.string() +
                            "' 2>'" + err.string() + "'";
    const int raw = std::system(cmd.c_str());
    Outcome r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  std::string tag_args(const std::string& rtc = "2026-01-01T00:00:00Z") {
    return "--file '" + (dir_ / "tag.bin").string() + "' --rtc " + rtc;
  }

  // The case study cut down to two minutes so a run takes well under a second.
  fs::path short_scenario() {
    auto j = json::parse(slurp(SYSMART_SOURCE_DIR "/scenarios/case_study.json"));
    j["duration"] = 120.0;
    const auto path = dir_ / "short.json";
    std::ofstream(path) << j.dump();
    return path;
  }

  fs::path dir_;
};

TEST_F(Cli, WiegandEncodeDecode) {
  auto r = run("wiegand encode 0xABCDEF");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "11010101111001101111011111\n");

  r = run("wiegand decode 11010101111001101111011111");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "ABCDEF\n");

  r = run("--json wiegand encode 11259375");
  EXPECT_EQ(json::parse(r.out), (json{{"bits", "11010101111001101111011111"}, {"tag_id", "ABCDEF"}}));
}

TEST_F(Cli, WiegandRejectsBadInput) {
  auto r = run("wiegand decode 01010101111001101111011111");
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("parity error"), std::string::npos) << r.err;

  r = run("wiegand decode 1101010111100110111101111");
  EXPECT_EQ(r.status, 2);

  r = run("wiegand encode 0x1000000");
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("range error"), std::string::npos);
}

TEST_F(Cli, PacketRoundTrip) {
  auto r = run("packet encode --store 1 --cart 42 --tag ABCDEF");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "0001002A414243444546\n");

  r = run("--json packet decode 0001002A414243444546");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(json::parse(r.out), (json{{"store_id", 1}, {"cart_id", 42}, {"tag_id", "ABCDEF"}}));

  EXPECT_EQ(run("packet encode --store 1 --cart 42 --tag abcdef").status, 2);
  EXPECT_EQ(run("packet decode 0001").status, 2);
}

TEST_F(Cli, TagLifecycle) {
  const std::string password = "abcdefghijklmnopqrst";
  ASSERT_EQ(run("tag init " + tag_args() + " --password " + password +
                " --temp-threshold 1600 --hum-threshold 16383 --interval 1")
                .status,
            0);
  EXPECT_EQ(run("tag init " + tag_args() + " --password " + password).status, 3);
  EXPECT_EQ(run("tag set " + tag_args() + " --field production_date --value 2026-01-01T00:00:00Z").status, 0);

  auto r = run("tag set " + tag_args() + " --field production_date --value 2026-01-02T00:00:00Z");
  EXPECT_EQ(r.status, 3);
  EXPECT_NE(r.err.find("tamper error"), std::string::npos) << r.err;

  EXPECT_EQ(run("tag event " + tag_args() + " --plant 3 --kind arrival").status, 0);
  r = run("tag sample " + tag_args("2026-01-01T00:01:00Z") + " --temp-raw 1738 --hum-raw 8192");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "logged (1 records)\n");
  r = run("tag sample " + tag_args("2026-01-01T00:02:00Z") + " --temp-raw 1000 --hum-raw 8192");
  EXPECT_EQ(r.out, "not logged\n");

  r = run("--json tag summary " + tag_args());
  ASSERT_EQ(r.status, 0);
  const auto summary = json::parse(r.out);
  EXPECT_EQ(summary.at("log_count"), 1);
  EXPECT_EQ(summary.at("production_date"), "2026-01-01T00:00:00Z");
  EXPECT_EQ(summary.at("plant_events").size(), 1u);

  r = run("tag log " + tag_args());
  EXPECT_EQ(r.out,
            "index,timestamp,minutes_since_first,temp_raw,hum_raw,temp_c,rh_percent\n"
            "0,2026-01-01T00:01:00Z,0,1738,8192,30.0122,50.0000\n");

  const auto dump_file = dir_ / "dump.bin";
  EXPECT_EQ(run("tag dump " + tag_args() + " --out '" + dump_file.string() + "'").status, 0);
  const auto raw = slurp(dump_file);
  r = run("tag dump " + tag_args());
  EXPECT_EQ(r.out, sysmart::to_hex(std::vector<std::uint8_t>(raw.begin(), raw.end())) + "\n");

  r = run("tag reset " + tag_args() + " --password wrongwrongwrongwrong");
  EXPECT_EQ(r.status, 3);
  EXPECT_NE(r.err.find("authentication error"), std::string::npos);
  EXPECT_EQ(run("tag reset " + tag_args() + " --password " + password).status, 0);
  EXPECT_EQ(run("tag summary " + tag_args()).status, 3);
}

TEST_F(Cli, MissingTagFileIsAnIoError) {
  EXPECT_EQ(run("tag summary " + tag_args()).status, 1);
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("wiegand").status, 2);
  EXPECT_EQ(run("packet encode --store 1").status, 2);
  EXPECT_EQ(run("--help").status, 0);
}

TEST_F(Cli, ShippedScenarioIsTheGeneratorOutput) {
  const auto r = run("scenario case-study --seed 7");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(json::parse(r.out), json::parse(slurp(SYSMART_SOURCE_DIR "/scenarios/case_study.json")));
  EXPECT_EQ(run("scenario validate '" SYSMART_SOURCE_DIR "/scenarios/case_study.json'").status, 0);
}

TEST_F(Cli, InvalidScenarioNamesTheField) {
  auto j = json::parse(slurp(SYSMART_SOURCE_DIR "/scenarios/case_study.json"));
  j["shoppers"][2]["speed"] = -1.0;
  std::ofstream(dir_ / "bad.json") << j.dump();
  const auto r = run("scenario validate '" + (dir_ / "bad.json").string() + "'");
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("shoppers[2].speed"), std::string::npos) << r.err;
}

TEST_F(Cli, SimulateIsReproducible) {
  const auto scenario = short_scenario().string();
  const auto a = run("--json simulate --scenario '" + scenario + "' --out '" + (dir_ / "a").string() + "'");
  const auto b = run("--json simulate --scenario '" + scenario + "' --out '" + (dir_ / "b").string() + "'");
  ASSERT_EQ(a.status, 0) << a.err;
  ASSERT_EQ(b.status, 0) << b.err;
  EXPECT_EQ(json::parse(a.out).at("digest"), json::parse(b.out).at("digest"));
  for (const auto* name : {"events.jsonl", "events.csv", "final_state.json"}) {
    const auto bytes = slurp(dir_ / "a" / name);
    EXPECT_FALSE(bytes.empty()) << name;
    EXPECT_EQ(bytes, slurp(dir_ / "b" / name)) << name;
  }

  const auto other = run("--json simulate --scenario '" + scenario + "' --seed 8");
  EXPECT_NE(json::parse(a.out).at("digest"), json::parse(other.out).at("digest"));
}

// Runs `sysmart serve` in a child process and reads the bound port back
// from its log line.
class Server {
 public:
  Server(const std::string& args, const fs::path& log) {
    pid_ = ::fork();
    if (pid_ == 0) {
      const std::string cmd = std::string("exec '") + SYSMART_CLI + "' serve --addr 127.0.0.1:0 " + args +
                              " 2>'" + log.string() + "'";
      ::execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    const std::regex re("listening on 127\\.0\\.0\\.1:(\\d+)");
    for (int i = 0; i < 200 && port_ == 0; ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
      std::ifstream in(log);
      std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      std::smatch m;
      if (std::regex_search(text, m, re)) port_ = std::stoi(m[1]);
    }
  }
  ~Server() {
    if (pid_ > 0 && !stopped_) stop();
  }
  int port() const { return port_; }
  std::string addr() const { return "127.0.0.1:" + std::to_string(port_); }
  int stop() {
    stopped_ = true;
    ::kill(pid_, SIGINT);
    int status = 0;
    ::waitpid(pid_, &status, 0);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

 private:
  pid_t pid_ = -1;
  int port_ = 0;
  bool stopped_ = false;
};

TEST_F(Cli, ServeSeedsFromScenarioAndKeepsItsJournal) {
  const std::string scenario = SYSMART_SOURCE_DIR "/scenarios/case_study.json";
  const auto journal = (dir_ / "journal.jsonl").string();
  const std::string args = "--scenario '" + scenario + "' --journal '" + journal + "'";

  const auto seeded = sysmart::sim::seed_database(sysmart::sim::load_scenario(scenario));
  {
    Server server(args, dir_ / "serve1.log");
    ASSERT_NE(server.port(), 0) << slurp(dir_ / "serve1.log");

    auto r = run("--json lanes fastest --addr " + server.addr() + " --store 1 --items 4");
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(json::parse(r.out).at("lane_id"), seeded.fastest_lane(1, 4));

    r = run("lanes fastest --addr " + server.addr() + " --store 99 --items 4");
    EXPECT_EQ(r.status, 4);
    EXPECT_NE(r.err.find("reference error"), std::string::npos) << r.err;

    r = run("--json branches --addr " + server.addr() + " --product 1000 --origin 1");
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(json::parse(r.out), json::array());

    httplib::Client client("127.0.0.1", server.port());
    const auto res = client.Post("/v1/positions", R"({"store_id":1,"cart_id":1,"tag_id":"100097"})",
                                 "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(server.stop(), 0);
  }

  // A restart replays the journal rather than reseeding.
  Server server(args, dir_ / "serve2.log");
  ASSERT_NE(server.port(), 0);
  httplib::Client client("127.0.0.1", server.port());
  const auto res = client.Get("/v1/stores/1/carts");
  ASSERT_TRUE(res);
  const auto carts = json::parse(res->body);
  const auto it = std::find_if(carts.begin(), carts.end(), [](const json& c) { return c.at("cart_id") == 1; });
  ASSERT_NE(it, carts.end());
  EXPECT_EQ(it->at("cart_location"), 2);
}

TEST_F(Cli, ClientReportsUnreachableServer) {
  const auto r = run("lanes fastest --addr 127.0.0.1:1 --store 1 --items 3");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("io error"), std::string::npos) << r.err;
}

TEST_F(Cli, ServePushesToMain) {
  // The main server needs the store row before it accepts pushes.
  const std::string scenario = SYSMART_SOURCE_DIR "/scenarios/case_study.json";
  Server main_seeded("--scenario '" + scenario + "'", dir_ / "main2.log");
  ASSERT_NE(main_seeded.port(), 0);
  Server local("--scenario '" + scenario + "' --push-to " + main_seeded.addr() + " --sync-period 0.2",
               dir_ / "local.log");
  ASSERT_NE(local.port(), 0);

  httplib::Client local_client("127.0.0.1", local.port());
  ASSERT_TRUE(local_client.Post("/v1/positions", R"({"store_id":1,"cart_id":5,"tag_id":"100000"})",
                                "application/json"));
  httplib::Client main_client("127.0.0.1", main_seeded.port());
  bool seen = false;
  for (int i = 0; i < 100 && !seen; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    const auto res = main_client.Get("/v1/stores/1/carts");
    if (!res) continue;
    for (const auto& c : json::parse(res->body)) seen |= c.at("cart_id") == 5 && c.at("cart_location") == 1;
  }
  EXPECT_TRUE(seen);
}

}  // namespace
