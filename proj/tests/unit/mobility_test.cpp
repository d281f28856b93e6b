#include <gtest/gtest.h>

#include "vanetsim/mobility.hpp"

using namespace vanetsim;

namespace {
WaypointState leg(Vec2 from, Vec2 to, double speed, SimTime start = SimTime{}) {
  WaypointState s;
  s.origin = from;
  s.destination = to;
  s.speed = speed;
  s.leg_start = start;
  s.pause_until = s.arrival();
  return s;
}
}  // namespace

TEST(PositionAt, InterpolatesLinearly) {
  const auto s = leg({0, 0}, {100, 0}, 10.0);
  const Vec2 p = position_at(s, SimTime::seconds(5));
  EXPECT_DOUBLE_EQ(p.x, 50.0);
  EXPECT_DOUBLE_EQ(p.y, 0.0);
}

TEST(PositionAt, LegBoundaries) {
  const auto s = leg({10, 20}, {40, 60}, 5.0, SimTime::seconds(2));  // 50 m at 5 m/s
  EXPECT_EQ(s.arrival(), SimTime::seconds(12));
  EXPECT_EQ(position_at(s, SimTime::seconds(2)), (Vec2{10, 20}));
  EXPECT_EQ(position_at(s, SimTime::seconds(12)), (Vec2{40, 60}));
  EXPECT_EQ(position_at(s, SimTime::seconds(0)), (Vec2{10, 20}));
  EXPECT_EQ(position_at(s, SimTime::seconds(99)), (Vec2{40, 60}));
}

TEST(NextLeg, DrawsInsideTerrainAndSpeedRange) {
  const Terrain t{1500, 1500};
  const WaypointParams p{3.0, 20.0, SimTime{}};
  RngStream rng(1);
  WaypointState s = leg({0, 0}, {750, 750}, 10.0);
  for (int i = 0; i < 2000; ++i) {
    s = next_leg(s, t, p, s.departure(), rng);
    ASSERT_TRUE(t.contains(s.destination));
    ASSERT_GE(s.speed, 3.0);
    ASSERT_LE(s.speed, 20.0);
  }
}

TEST(NextLeg, ZeroPauseDepartsAtArrival) {
  const Terrain t{1500, 1500};
  RngStream rng(2);
  const auto s = next_leg(leg({0, 0}, {100, 100}, 5.0), t, WaypointParams{3, 20, SimTime{}}, SimTime::seconds(7), rng);
  EXPECT_EQ(s.origin, (Vec2{100, 100}));
  EXPECT_EQ(s.leg_start, SimTime::seconds(7));
  EXPECT_EQ(s.departure(), s.arrival());
}

TEST(NextLeg, PauseDelaysDeparture) {
  const Terrain t{1500, 1500};
  RngStream rng(2);
  const auto s = next_leg(leg({0, 0}, {100, 100}, 5.0), t, WaypointParams{3, 20, SimTime::seconds(4)}, SimTime{}, rng);
  EXPECT_EQ(s.departure(), s.arrival() + SimTime::seconds(4));
}

TEST(MobilityModel, RandomWaypointStaysInTerrainWithLegalSpeeds) {
  const Terrain t{1500, 1500};
  std::vector<MobilityModel::NodeSpec> specs(15);
  RngStream place(8);
  for (auto& s : specs) s.initial = uniform_point(t, place);
  MobilityModel m(t, WaypointParams{3, 20, SimTime{}}, specs, RngStream(9));
  std::vector<Vec2> prev = m.positions();
  for (int tick = 1; tick <= 30000; ++tick) {  // 3000 s at 100 ms
    m.advance(SimTime::millis(100) * tick);
    for (std::size_t i = 0; i < m.size(); ++i) {
      const Vec2 p = m.position(static_cast<NodeId>(i));
      ASSERT_TRUE(t.contains(p)) << "node " << i << " tick " << tick;
      // At most 20 m/s * 0.1 s travelled per tick.
      ASSERT_LE(distance(p, prev[i]), 2.0 + 1e-6);
    }
    prev = m.positions();
  }
  ASSERT_FALSE(m.leg_speeds().empty());
  for (double v : m.leg_speeds()) {
    EXPECT_GE(v, 3.0);
    EXPECT_LE(v, 20.0);
  }
}

TEST(MobilityModel, StaticNodesDoNotMove) {
  std::vector<MobilityModel::NodeSpec> specs(2);
  specs[0] = {MobilityModel::Kind::Static, {10, 10}, {}};
  specs[1] = {MobilityModel::Kind::Static, {500, 700}, {}};
  MobilityModel m(Terrain{}, WaypointParams{}, specs, RngStream(1));
  m.advance(SimTime::seconds(100));
  EXPECT_EQ(m.position(0), (Vec2{10, 10}));
  EXPECT_EQ(m.position(1), (Vec2{500, 700}));
}

TEST(MobilityModel, ScriptedNodeLoopsThroughWaypoints) {
  std::vector<MobilityModel::NodeSpec> specs(1);
  specs[0] = {MobilityModel::Kind::Scripted, {0, 0}, {{100, 0}, {0, 0}}};
  MobilityModel m(Terrain{}, WaypointParams{10, 10, SimTime{}}, specs, RngStream(1));
  m.advance(SimTime::seconds(5));
  EXPECT_NEAR(m.position(0).x, 50.0, 1e-9);
  m.advance(SimTime::seconds(10));
  EXPECT_NEAR(m.position(0).x, 100.0, 1e-9);
  m.advance(SimTime::seconds(15));
  EXPECT_NEAR(m.position(0).x, 50.0, 1e-9);
  m.advance(SimTime::seconds(25));
  EXPECT_NEAR(m.position(0).x, 50.0, 1e-9);  // second lap, outbound
}

TEST(MobilityModel, SameSeedSameTrajectories) {
  std::vector<MobilityModel::NodeSpec> specs(5);
  for (std::size_t i = 0; i < specs.size(); ++i) specs[i].initial = {100.0 * i, 50.0};
  MobilityModel a(Terrain{}, WaypointParams{}, specs, RngStream(77));
  MobilityModel b(Terrain{}, WaypointParams{}, specs, RngStream(77));
  for (int k = 1; k < 500; ++k) {
    a.advance(SimTime::seconds(k));
    b.advance(SimTime::seconds(k));
    ASSERT_EQ(a.positions(), b.positions());
  }
}
