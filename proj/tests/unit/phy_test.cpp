#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "vanetsim/phy.hpp"

using namespace vanetsim;

namespace {

struct Recorder : RadioListener {
  void on_carrier_busy() override { ++busy; }
  void on_carrier_idle() override { ++idle; }
  void on_reception_end(const MacFrame& f, bool errored) override { ends.push_back({f.src, errored}); }
  void on_transmit_end() override { ++tx_done; }
  void on_radio_mode(RadioMode m) override { modes.push_back(m); }
  int busy = 0, idle = 0, tx_done = 0;
  std::vector<std::pair<NodeId, bool>> ends;
  std::vector<RadioMode> modes;
};

struct Air {
  explicit Air(std::vector<Vec2> p, RadioParams params = {})
      : pos(std::move(p)), ch(sched, params, pos.size(), [this](NodeId n) { return pos[n]; }), rec(pos.size()) {
    for (NodeId i = 0; i < pos.size(); ++i) ch.attach(i, &rec[i]);
  }
  MacFrame frame(NodeId src, std::uint32_t bytes = 100) {
    MacFrame f;
    f.src = src;
    f.dst = kBroadcast;
    f.header_bytes = bytes;
    return f;
  }
  Scheduler sched;
  std::vector<Vec2> pos;
  Channel ch;
  std::vector<Recorder> rec;
};

// Oracle: the two textbook formulas evaluated in linear units.
double free_space_mw(double d, const RadioParams& p) {
  const double lambda = 299'792'458.0 / p.frequency_hz;
  const double pt = std::pow(10.0, p.tx_power_dbm / 10.0);
  return pt * p.antenna_gain_tx * p.antenna_gain_rx * std::pow(lambda / (4 * std::numbers::pi * d), 2);
}
double two_ray_mw(double d, const RadioParams& p) {
  const double pt = std::pow(10.0, p.tx_power_dbm / 10.0);
  const double h = p.antenna_height_m;
  return pt * p.antenna_gain_tx * p.antenna_gain_rx * h * h * h * h / std::pow(d, 4);
}
double dbm(double mw) { return 10.0 * std::log10(mw); }

}  // namespace

TEST(PathLoss, MatchesFreeSpaceBelowCrossoverAndTwoRayBeyond) {
  const RadioParams p;
  const double dc = p.crossover_distance();
  EXPECT_NEAR(dc, 4 * std::numbers::pi * 1.5 * 1.5 / (299'792'458.0 / 2.4e9), 1e-9);
  for (double d : {1.0, 10.0, 50.0, 100.0, dc * 0.99}) EXPECT_NEAR(received_power_dbm(d, p), dbm(free_space_mw(d, p)), 1e-9);
  for (double d : {dc, 300.0, 1000.0}) EXPECT_NEAR(received_power_dbm(d, p), dbm(two_ray_mw(d, p)), 1e-9);
}

TEST(PathLoss, ContinuousAtCrossover) {
  const RadioParams p;
  const double dc = p.crossover_distance();
  EXPECT_NEAR(received_power_dbm(dc * (1 - 1e-9), p), received_power_dbm(dc, p), 0.5);
  EXPECT_NEAR(dbm(free_space_mw(dc, p)), dbm(two_ray_mw(dc, p)), 0.5);
}

TEST(PathLoss, DoublingDistanceBeyondCrossoverCosts12Decibels) {
  const RadioParams p;
  const double d = p.crossover_distance() * 1.5;
  EXPECT_NEAR(received_power_dbm(d, p) - received_power_dbm(2 * d, p), 40 * std::log10(2.0), 1e-9);
  EXPECT_NEAR(40 * std::log10(2.0), 12.04, 0.005);
}

TEST(PathLoss, ZeroDistanceIsAContractViolation) {
  EXPECT_THROW(received_power_dbm(0.0, RadioParams{}), ContractViolation);
  EXPECT_THROW(received_power_dbm(-1.0, RadioParams{}), ContractViolation);
}

TEST(PathLoss, DefaultThresholdMakesHundredMetreCapBinding) {
  const RadioParams p;
  EXPECT_GE(received_power_dbm(100.0, p), p.rx_threshold_dbm);
  EXPECT_TRUE(in_range(100.0, p));
  EXPECT_FALSE(in_range(100.001, p));
  EXPECT_FALSE(in_range(150.0, p));
}

TEST(PathLoss, ThresholdCanBindBeforeTheCap) {
  RadioParams p;
  p.max_range_m = 1000;
  p.rx_threshold_dbm = -60;
  EXPECT_TRUE(in_range(10.0, p));
  EXPECT_FALSE(in_range(200.0, p));
}

TEST(Airtime, OverheadPlusBitsOverRateRoundedUp) {
  const RadioParams p;
  EXPECT_EQ(airtime(8 * 100, p), SimTime::micros(192 + 400));
  EXPECT_EQ(airtime(1, p), SimTime::micros(193));
  EXPECT_EQ(airtime(8 * (512 + 20 + 34), p), SimTime::micros(192 + 2264));
  EXPECT_THROW(airtime(0, p), ContractViolation);
}

TEST(Channel, IsolatedLinkGivesOneCleanReception) {
  Air a({{0, 0}, {50, 0}});
  a.ch.transmit(0, a.frame(0));
  EXPECT_TRUE(a.ch.carrier_busy(1));
  EXPECT_TRUE(a.ch.carrier_busy(1, a.sched.now()));
  EXPECT_FALSE(a.ch.carrier_busy(0));  // own transmission does not count
  a.sched.run_until(SimTime::seconds(1));
  ASSERT_EQ(a.rec[1].ends.size(), 1u);
  EXPECT_FALSE(a.rec[1].ends[0].second);
  EXPECT_TRUE(a.rec[0].ends.empty());  // never hears itself
  EXPECT_EQ(a.rec[0].tx_done, 1);
  EXPECT_EQ(a.ch.stats(1).reception_starts, 1u);
  EXPECT_EQ(a.ch.stats(1).reception_ends, 1u);
  EXPECT_FALSE(a.ch.carrier_busy(1));
}

TEST(Channel, OverlapErrorsBothReceptions) {
  Air a({{0, 0}, {80, 0}, {160, 0}});  // 0 and 2 are hidden from each other
  a.ch.transmit(0, a.frame(0));
  a.sched.run_until(SimTime::micros(100));
  EXPECT_FALSE(a.ch.carrier_busy(2));
  a.ch.transmit(2, a.frame(2));
  a.sched.run_until(SimTime::seconds(1));
  ASSERT_EQ(a.rec[1].ends.size(), 2u);
  int errored = 0;
  for (auto& e : a.rec[1].ends) errored += e.second;
  EXPECT_EQ(errored, 2);
}

TEST(Channel, BackToBackFramesDoNotCollide) {
  Air a({{0, 0}, {80, 0}, {160, 0}});
  const SimTime end = a.ch.transmit(0, a.frame(0));
  a.sched.run_until(end);
  a.ch.transmit(2, a.frame(2));
  a.sched.run_until(SimTime::seconds(1));
  ASSERT_EQ(a.rec[1].ends.size(), 2u);
  EXPECT_FALSE(a.rec[1].ends[0].second);
  EXPECT_FALSE(a.rec[1].ends[1].second);
}

TEST(Channel, NoReceptionBeyondMaxRange) {
  Air a({{0, 0}, {150, 0}});
  a.ch.transmit(0, a.frame(0));
  EXPECT_FALSE(a.ch.carrier_busy(1));
  a.sched.run_until(SimTime::seconds(1));
  EXPECT_TRUE(a.rec[1].ends.empty());
  EXPECT_EQ(a.ch.stats(1).reception_starts, 0u);
}

TEST(Channel, HalfDuplexTransmitterLosesReception) {
  Air a({{0, 0}, {50, 0}});
  a.ch.transmit(0, a.frame(0, 500));
  a.sched.run_until(SimTime::micros(50));
  a.ch.transmit(1, a.frame(1, 10));
  a.sched.run_until(SimTime::seconds(1));
  ASSERT_EQ(a.rec[1].ends.size(), 1u);
  EXPECT_TRUE(a.rec[1].ends[0].second);
  ASSERT_EQ(a.rec[0].ends.size(), 1u);  // 0 was transmitting when 1's frame began
  EXPECT_TRUE(a.rec[0].ends[0].second);
}

TEST(Channel, TransmittingTwiceIsAContractViolation) {
  Air a({{0, 0}, {50, 0}});
  a.ch.transmit(0, a.frame(0));
  EXPECT_THROW(a.ch.transmit(0, a.frame(0)), ContractViolation);
}

TEST(Channel, DisabledRadioNeitherReceivesNorSenses) {
  Air a({{0, 0}, {50, 0}});
  a.ch.set_enabled(1, false);
  a.ch.transmit(0, a.frame(0));
  EXPECT_FALSE(a.ch.carrier_busy(1));
  a.sched.run_until(SimTime::seconds(1));
  EXPECT_TRUE(a.rec[1].ends.empty());
  EXPECT_THROW(a.ch.transmit(1, a.frame(1)), ContractViolation);
}

TEST(Channel, ModeTracksTxRxIdle) {
  Air a({{0, 0}, {50, 0}});
  std::vector<std::pair<NodeId, RadioMode>> seen;
  a.ch.set_mode_observer([&](NodeId n, RadioMode m) { seen.push_back({n, m}); });
  a.ch.transmit(0, a.frame(0));
  EXPECT_EQ(a.ch.mode(0), RadioMode::Tx);
  EXPECT_EQ(a.ch.mode(1), RadioMode::Rx);
  a.sched.run_until(SimTime::seconds(1));
  EXPECT_EQ(a.ch.mode(0), RadioMode::Idle);
  EXPECT_EQ(a.ch.mode(1), RadioMode::Idle);
  EXPECT_EQ(seen.size(), 4u);
  EXPECT_EQ(a.rec[1].modes, (std::vector<RadioMode>{RadioMode::Rx, RadioMode::Idle}));
}

TEST(Channel, EveryStartHasOneEndAndTheSplitIsExhaustive) {
  // Random bursts among 6 nodes in a 150 m box.
  std::vector<Vec2> pos;
  RngStream rng(4);
  for (int i = 0; i < 6; ++i) pos.push_back({rng.uniform(0, 150), rng.uniform(0, 150)});
  Air a(pos);
  for (int k = 0; k < 400; ++k) {
    const auto n = static_cast<NodeId>(rng.uniform_int(0, 5));
    const SimTime at = SimTime::micros(k * 300 + rng.uniform_int(0, 250));
    a.sched.schedule(at, n, EventKind::TimerExpiry, [&a, n] {
      if (!a.ch.transmitting(n)) a.ch.transmit(n, a.frame(n));
    });
  }
  a.sched.run_until(SimTime::seconds(10));
  for (NodeId i = 0; i < 6; ++i) {
    EXPECT_EQ(a.ch.stats(i).reception_starts, a.ch.stats(i).reception_ends);
    EXPECT_EQ(a.rec[i].ends.size(), a.ch.stats(i).reception_ends);
    EXPECT_EQ(a.rec[i].busy, a.rec[i].idle);
  }
}
