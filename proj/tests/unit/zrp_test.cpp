#include <gtest/gtest.h>

#include "support.hpp"
#include "vanetsim/zrp.hpp"

using namespace vanetsim;
using testkit::line_positions;
using testkit::static_scenario;

namespace {

const ZrpAgent& zrp(const Network& net, NodeId n) { return dynamic_cast<const ZrpAgent&>(net.node(n).agent()); }

std::uint64_t ierp_sent(const Network& net) {
  std::uint64_t sum = 0;
  for (NodeId i = 0; i < net.size(); ++i) {
    const auto& c = net.node(i).routing_counters().control_sent;
    for (MessageType t : {MessageType::IerpQuery, MessageType::IerpReply, MessageType::IerpError}) {
      sum += c[static_cast<std::size_t>(t)];
    }
  }
  return sum;
}

// Zone state settles within one IARP hold time.
constexpr SimTime kSettle = SimTime::seconds(12);

int ceil_div(int a, int b) { return (a + b - 1) / b; }

int diameter(const Adjacency& g) {
  int d = 0;
  for (const auto& [n, _] : g) {
    for (const auto& [m, h] : testkit::bfs_hops(g, n)) d = std::max(d, h);
  }
  return d;
}

}  // namespace

TEST(Zrp, LineZoneAndPeripheralSet) {
  Network net(static_scenario(Protocol::Zrp, line_positions(4), 30));
  net.run_until(kSettle);
  const auto& a = zrp(net, 0);
  EXPECT_TRUE(a.in_zone(1));
  EXPECT_TRUE(a.in_zone(2));
  EXPECT_FALSE(a.in_zone(3));
  EXPECT_EQ(a.peripheral(), (std::set<NodeId>{2}));
  EXPECT_EQ(a.zone_table().find(2)->hop_count, 2u);
  EXPECT_EQ(zrp(net, 1).peripheral(), (std::set<NodeId>{3}));
}

TEST(Zrp, StarCenterHasNoPeripheralNodes) {
  const std::vector<Vec2> star{{200, 200}, {290, 200}, {110, 200}, {200, 290}, {200, 110}};
  Network net(static_scenario(Protocol::Zrp, star, 30));
  net.run_until(kSettle);
  EXPECT_TRUE(zrp(net, 0).peripheral().empty());
  for (NodeId leaf = 1; leaf < 5; ++leaf) EXPECT_TRUE(zrp(net, 0).in_zone(leaf));
  EXPECT_EQ(zrp(net, 1).peripheral(), (std::set<NodeId>{2, 3, 4}));
}

TEST(Zrp, RadiusOneZoneIsTheNeighborhood) {
  auto cfg = static_scenario(Protocol::Zrp, line_positions(4), 30);
  cfg.routing.zone_radius = 1;
  Network net(cfg);
  net.run_until(kSettle);
  EXPECT_TRUE(zrp(net, 1).in_zone(0));
  EXPECT_TRUE(zrp(net, 1).in_zone(2));
  EXPECT_FALSE(zrp(net, 1).in_zone(3));
  EXPECT_EQ(zrp(net, 1).peripheral(), (std::set<NodeId>{0, 2}));
}

TEST(Zrp, IntrazoneDestinationNeedsNoQuery) {
  Network net(static_scenario(Protocol::Zrp, line_positions(4), 30));
  net.run_until(kSettle);
  net.inject(0, 2, 64);
  net.inject(3, 1, 64);
  net.run_until(kSettle + SimTime::seconds(2));
  EXPECT_EQ(net.injected_delivered(), 2u);
  EXPECT_EQ(ierp_sent(net), 0u);
  EXPECT_EQ(net.node(0).routing_counters().discoveries, 0u);
}

TEST(Zrp, FiveNodeLineResolvesInOneBordercast) {
  Network net(static_scenario(Protocol::Zrp, line_positions(5), 30));
  const auto g = testkit::geometric_graph(line_positions(5), RadioParams{});
  net.run_until(kSettle);
  net.inject(0, 4, 64);
  net.run_until(kSettle + SimTime::seconds(2));
  EXPECT_EQ(net.injected_delivered(), 1u);
  EXPECT_EQ(testkit::bordercast_stages(g, 0, 4, 2), 1);
  EXPECT_EQ(zrp(net, 0).last_resolved_stages(), 1);
  std::vector<NodeId> path;
  EXPECT_EQ(testkit::walk_routes(net, 0, 4, &path), testkit::Walk::Reached);
  EXPECT_EQ(path, (std::vector<NodeId>{0, 1, 2, 3, 4}));
}

TEST(Zrp, StagesMatchBordercastOracleAndDiameterBound) {
  struct Case {
    std::vector<Vec2> pos;
    NodeId src, dst;
  };
  std::vector<Case> cases;
  for (int n = 4; n <= 10; ++n) cases.push_back({line_positions(n), 0, static_cast<NodeId>(n - 1)});
  cases.push_back({testkit::grid_positions(3, 3), 0, 8});
  cases.push_back({testkit::grid_positions(4, 3), 0, 11});
  cases.push_back({testkit::grid_positions(5, 2), 0, 9});
  cases.push_back({testkit::grid_positions(5, 3), 2, 14});
  for (const Case& c : cases) {
    const auto g = testkit::geometric_graph(c.pos, RadioParams{});
    Network net(static_scenario(Protocol::Zrp, c.pos, 30));
    net.run_until(kSettle);
    net.inject(c.src, c.dst, 64);
    net.run_until(kSettle + SimTime::seconds(5));
    const int oracle = testkit::bordercast_stages(g, c.src, c.dst, 2);
    ASSERT_EQ(net.injected_delivered(), 1u) << c.pos.size() << " nodes";
    EXPECT_EQ(zrp(net, c.src).last_resolved_stages(), oracle) << c.pos.size() << " nodes";
    EXPECT_LE(oracle, ceil_div(diameter(g), 2));
  }
}

TEST(Zrp, QueriesNeverTravelAsBroadcasts) {
  Network net(static_scenario(Protocol::Zrp, testkit::grid_positions(4, 3), 40));
  testkit::AirLog air;
  air.attach(net.channel());
  net.run_until(kSettle);
  net.inject(0, 11, 64);
  net.inject(8, 3, 64);
  net.run();
  std::size_t ierp_frames = 0;
  for (const auto& e : air.entries) {
    const auto& p = e.tx.frame.payload;
    if (!p) continue;
    const bool ierp = p->type == MessageType::IerpQuery || p->type == MessageType::IerpReply ||
                      p->type == MessageType::IerpError;
    if (!ierp) continue;
    ++ierp_frames;
    EXPECT_NE(e.tx.frame.dst, kBroadcast);
  }
  EXPECT_GT(ierp_frames, 0u);
}

TEST(Zrp, UnreachableDestinationGivesUpAfterRetries) {
  Network net(static_scenario(Protocol::Zrp, {{10, 10}, {100, 10}, {600, 10}}, 30));
  net.run_until(kSettle);
  net.inject(0, 2, 64);
  net.run();
  EXPECT_EQ(net.injected_delivered(), 0u);
  EXPECT_EQ(net.node(0).routing_counters().pending_drops, 1u);
  EXPECT_FALSE(dynamic_cast<const ReactiveAgent&>(net.node(0).agent()).discovery_in_flight(2));
}

TEST(Zrp, ZoneShrinksWhenANodeLeaves) {
  Network net(static_scenario(Protocol::Zrp, line_positions(4), 40));
  net.run_until(kSettle);
  ASSERT_TRUE(zrp(net, 0).in_zone(2));
  net.node(2).power_off();
  net.run_until(kSettle + SimTime::seconds(12));
  EXPECT_FALSE(zrp(net, 0).in_zone(2));
  EXPECT_TRUE(zrp(net, 0).in_zone(1));
}
