#include <gtest/gtest.h>
#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vanetsim/metrics.hpp"
#include "vanetsim/scenario.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("vanetsim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result cli(const std::string& args) {
    const fs::path log = dir_ / "stdout.txt";
    const std::string cmd = std::string("\"") + VANETSIM_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
  }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ValidatePrintsTheResolvedConfig) {
  const auto r = cli("validate table1");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("num_nodes = 15"), std::string::npos);
  EXPECT_NE(r.out.find("tx_power_dbm = 15"), std::string::npos);
}

TEST_F(Cli, BadScenarioExitsWithOne) {
  const auto bad = write("bad.scn", "num_nodes = 3\nnum_nodes = 4\n");
  auto r = cli("validate " + bad.string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("num_nodes"), std::string::npos);
  EXPECT_EQ(cli("validate " + (dir_ / "missing.scn").string()).code, 1);
  EXPECT_EQ(cli("run " + write("r.scn", "zone_radius = 0\n").string()).code, 1);
}

TEST_F(Cli, BadArgumentsExitWithOne) {
  EXPECT_EQ(cli("run table1 --protocol dsr").code, 1);
  EXPECT_EQ(cli("frobnicate").code, 1);
  EXPECT_EQ(cli("compare table1 --protocols aodv --seeds 1").code, 1);
  EXPECT_EQ(cli("compare table1 --protocols aodv,olsr --seeds 3..1").code, 1);
  EXPECT_EQ(cli("--help").code, 0);
}

TEST_F(Cli, RunWritesMetricsEchoAndHeader) {
  const auto scn = write("short.scn", vanetsim::bundled_table1() + "sim_time_s = 60\n");
  // sim_time_s appears twice now: that is a duplicate key and must fail.
  EXPECT_EQ(cli("run " + scn.string()).code, 1);

  std::string text = vanetsim::bundled_table1();
  text.replace(text.find("sim_time_s = 3000"), 17, "sim_time_s = 60");
  const auto ok = write("short.scn", text);
  const auto out = dir_ / "out";
  const auto r = cli("run " + ok.string() + " --seed 4 --protocol olsr --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto ledger = vanetsim::MetricsLedger::from_csv(slurp(out / "metrics.csv"));
  EXPECT_EQ(vanetsim::format_metric(*ledger.get("run", 0, "protocol")), "olsr");
  EXPECT_EQ(ledger.number("run", 0, "seed"), 4);

  const auto echo = vanetsim::load_scenario(out / "scenario.resolved.scn");
  EXPECT_EQ(echo.seed, 4u);
  EXPECT_EQ(echo.protocol, vanetsim::Protocol::Olsr);
  EXPECT_EQ(echo.sim_time_s, 60);

  const auto header = nlohmann::json::parse(slurp(out / "run.json"));
  EXPECT_EQ(header["protocol"], "olsr");
  EXPECT_EQ(header["seed"], 4);
  EXPECT_EQ(header["scenario_hash"], vanetsim::scenario_hash(echo));
  EXPECT_TRUE(header.contains("wall_clock_s"));
  EXPECT_EQ(header["app_sent"], ledger.number("run", 0, "app_sent"));
}

TEST_F(Cli, RepeatedRunsAreByteIdentical) {
  std::string text = vanetsim::bundled_table1();
  text.replace(text.find("sim_time_s = 3000"), 17, "sim_time_s = 120");
  const auto scn = write("s.scn", text);
  ASSERT_EQ(cli("run " + scn.string() + " --out " + (dir_ / "a").string()).code, 0);
  ASSERT_EQ(cli("run " + scn.string() + " --out " + (dir_ / "b").string()).code, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "metrics.csv"), slurp(dir_ / "b" / "metrics.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "scenario.resolved.scn"), slurp(dir_ / "b" / "scenario.resolved.scn"));
}

TEST_F(Cli, CompareWritesRankingForEverySeed) {
  std::string text = vanetsim::bundled_table1();
  text.replace(text.find("sim_time_s = 3000"), 17, "sim_time_s = 60");
  const auto scn = write("s.scn", text);
  const auto out = dir_ / "cmp";
  const auto r = cli("compare " + scn.string() + " --protocols aodv,olsr --seeds 1..3 --jobs 2 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.out;
  for (const char* p : {"aodv", "olsr"}) {
    for (int s = 1; s <= 3; ++s) {
      EXPECT_TRUE(fs::exists(out / (std::string(p) + "-seed" + std::to_string(s)) / "metrics.csv"));
    }
  }
  const std::string ranking = slurp(out / "ranking.csv");
  EXPECT_EQ(ranking.rfind("metric,protocol,mean,rank\n", 0), 0u);
  EXPECT_NE(ranking.find("dcf_broadcasts_received,olsr"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "ranking.txt"));
  EXPECT_NE(r.out.find("mac_packets_from_network"), std::string::npos);
}
