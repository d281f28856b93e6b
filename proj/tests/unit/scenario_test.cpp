#include <gtest/gtest.h>

#include "vanetsim/scenario.hpp"

using namespace vanetsim;

namespace {
std::string error_of(const std::string& text) {
  try {
    load_scenario_text(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}
}  // namespace

TEST(Scenario, BundledDefaultMatchesTableValues) {
  const ScenarioConfig c = load_scenario("table1");
  EXPECT_EQ(c.name, "table1");
  EXPECT_EQ(c.width_m, 1500);
  EXPECT_EQ(c.height_m, 1500);
  EXPECT_EQ(c.sim_time_s, 3000);
  EXPECT_EQ(c.num_nodes, 15);
  EXPECT_EQ(c.mobility, MobilityKind::RandomWaypoint);
  EXPECT_EQ(c.speed_min_mps, 3);
  EXPECT_EQ(c.speed_max_mps, 20);
  EXPECT_EQ(c.session_count, 5);
  EXPECT_EQ(c.payload_bytes, 512u);
  EXPECT_EQ(c.interval_ms, 250);
  EXPECT_EQ(c.radio.frequency_hz, 2.4e9);
  EXPECT_EQ(c.radio.bitrate_bps, 2e6);
  EXPECT_EQ(c.radio.max_range_m, 100);
  EXPECT_EQ(c.radio.tx_power_dbm, 15);
  EXPECT_EQ(c.battery.capacity_mah, 1500);
  EXPECT_EQ(c.altitude_m, 1500);
  EXPECT_EQ(c.weather_interval_ms, 100);
  EXPECT_EQ(c.mac.retry_limit, 7);
  EXPECT_EQ(c.mac.rts_threshold_bytes, 256u);
}

TEST(Scenario, CommentsBlankLinesAndSpacing) {
  const auto c = load_scenario_text("# header\n\n  num_nodes=4   # trailing\nprotocol =  olsr\n");
  EXPECT_EQ(c.num_nodes, 4);
  EXPECT_EQ(c.protocol, Protocol::Olsr);
  EXPECT_EQ(c.width_m, 1500);  // default kept
}

TEST(Scenario, UnknownKeyIsNamed) {
  EXPECT_NE(error_of("numnodes = 4\n").find("numnodes"), std::string::npos);
  EXPECT_NE(error_of("foo.3 = 1\n").find("foo.3"), std::string::npos);
}

TEST(Scenario, DuplicateKeyIsRejected) {
  const auto e = error_of("num_nodes = 4\nnum_nodes = 5\n");
  EXPECT_NE(e.find("num_nodes"), std::string::npos);
  EXPECT_NE(e.find("twice"), std::string::npos);
}

TEST(Scenario, MalformedValuesAreRejected) {
  EXPECT_FALSE(error_of("num_nodes = four\n").empty());
  EXPECT_FALSE(error_of("num_nodes = 4.5\n").empty());
  EXPECT_FALSE(error_of("width_m = nan\n").empty());
  EXPECT_FALSE(error_of("protocol = dsr\n").empty());
  EXPECT_FALSE(error_of("mobility = teleport\n").empty());
  EXPECT_FALSE(error_of("just a line\n").empty());
  EXPECT_FALSE(error_of("= 3\n").empty());
}

TEST(Scenario, CrossFieldConstraints) {
  EXPECT_NE(error_of("zone_radius = 0\n").find("zone_radius"), std::string::npos);
  EXPECT_NE(error_of("difs_us = 40\n").find("difs_us"), std::string::npos);
  EXPECT_NE(error_of("cw_min = 30\n").find("cw_min"), std::string::npos);
  EXPECT_NE(error_of("cw_min = 1023\ncw_max = 31\n").find("cw_min"), std::string::npos);
  EXPECT_NE(error_of("speed_min_mps = 30\n").find("speed_min_mps"), std::string::npos);
  EXPECT_NE(error_of("num_nodes = 2\nsessions = 3\n").find("sessions"), std::string::npos);
  EXPECT_NE(error_of("num_nodes = 0\n").find("num_nodes"), std::string::npos);
  EXPECT_NE(error_of("width_m = -1\n").find("width_m"), std::string::npos);
  EXPECT_NE(error_of("capacity_mah = 0\n").find("capacity_mah"), std::string::npos);
}

TEST(Scenario, PositionsAndSessionsAreChecked) {
  EXPECT_NE(error_of("num_nodes = 2\nposition.2 = 1,1\n").find("position.2"), std::string::npos);
  EXPECT_NE(error_of("position.0 = 1600,1\n").find("position.0"), std::string::npos);
  EXPECT_NE(error_of("session.0 = 3,3\n").find("session.0"), std::string::npos);
  EXPECT_NE(error_of("session.0 = 1\n").find("session.0"), std::string::npos);
  const auto c = load_scenario_text("mobility = static\nposition.1 = 20,30\nsession.0 = 0,1,5,10\n");
  EXPECT_EQ(c.positions.at(1), (Vec2{20, 30}));
  EXPECT_EQ(*c.sessions.at(0).start_s, 5);
  EXPECT_EQ(*c.sessions.at(0).stop_s, 10);
}

TEST(Scenario, TxPowerIsConfigurable) {
  EXPECT_EQ(load_scenario_text("tx_power_dbm = 150\n").radio.tx_power_dbm, 150);
}

TEST(Scenario, EchoRoundTripsExactly) {
  const std::string custom =
      "num_nodes = 6\nprotocol = zrp\nzone_radius = 3\nrts_threshold_bytes = 1000\nsession.0 = 0,5\nsession.1 = "
      "2,3,1.5,40\nposition.4 = 12.25,99\nwaypoints.4 = 50,50 60,70\nmobility_update_ms = 50\ntx_power_dbm = "
      "14.5\nseed = 99\n";
  for (const std::string& text : {bundled_table1(), custom}) {
    const ScenarioConfig a = load_scenario_text(text);
    const std::string echo = resolved_echo(a);
    const ScenarioConfig b = load_scenario_text(echo);
    EXPECT_EQ(resolved_echo(b), echo);
    EXPECT_EQ(scenario_hash(a), scenario_hash(b));
    EXPECT_EQ(b.seed, a.seed);
    EXPECT_EQ(b.protocol, a.protocol);
  }
}

TEST(Scenario, HashIgnoresSeedAndProtocolOnly) {
  ScenarioConfig a = load_scenario("table1");
  ScenarioConfig b = a;
  b.seed = 7;
  b.protocol = Protocol::Zrp;
  EXPECT_EQ(scenario_hash(a), scenario_hash(b));
  b.interval_ms = 500;
  EXPECT_NE(scenario_hash(a), scenario_hash(b));
  ScenarioConfig c = a;
  c.seed = 7;
  EXPECT_NE(resolved_echo(a), resolved_echo(c));  // the echo itself records the seed
}

TEST(Scenario, MissingFileIsAValidationError) {
  EXPECT_THROW(load_scenario("/nonexistent/x.scn"), ValidationError);
}
