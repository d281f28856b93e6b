#pragma once

// Fixtures shared by the unit and acceptance suites.

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <vector>

#include "vanetsim/network.hpp"

namespace vanetsim::testkit {

/// Static nodes at the given positions, no sessions, on a terrain large
/// enough to hold them.
inline ScenarioConfig static_scenario(Protocol protocol, const std::vector<Vec2>& positions, double sim_time_s = 60) {
  ScenarioConfig c;
  c.name = "test";
  c.protocol = protocol;
  c.mobility = MobilityKind::Static;
  c.num_nodes = static_cast<int>(positions.size());
  c.width_m = 1500;
  c.height_m = 1500;
  for (const Vec2& p : positions) {
    c.width_m = std::max(c.width_m, p.x);
    c.height_m = std::max(c.height_m, p.y);
  }
  for (std::size_t i = 0; i < positions.size(); ++i) c.positions[static_cast<NodeId>(i)] = positions[i];
  c.session_count = 0;
  c.sim_time_s = sim_time_s;
  return c;
}

/// n nodes on a horizontal line, `spacing` apart (90 m: neighbors only).
inline std::vector<Vec2> line_positions(int n, double spacing = 90.0) {
  std::vector<Vec2> out;
  for (int i = 0; i < n; ++i) out.push_back({10.0 + spacing * i, 10.0});
  return out;
}

/// Unit-disk adjacency the PHY realizes for static positions.
inline Adjacency geometric_graph(const std::vector<Vec2>& pos, const RadioParams& radio) {
  Adjacency g;
  for (NodeId i = 0; i < pos.size(); ++i) {
    g[i];
    for (NodeId j = 0; j < pos.size(); ++j) {
      if (i != j && in_range(distance(pos[i], pos[j]), radio)) g[i].insert(j);
    }
  }
  return g;
}

/// Plain BFS hop distances (independent of PathTree).
inline std::map<NodeId, int> bfs_hops(const Adjacency& g, NodeId root) {
  std::map<NodeId, int> d{{root, 0}};
  std::queue<NodeId> q;
  q.push(root);
  while (!q.empty()) {
    const NodeId u = q.front();
    q.pop();
    auto it = g.find(u);
    if (it == g.end()) continue;
    for (NodeId v : it->second) {
      if (!d.contains(v)) {
        d[v] = d[u] + 1;
        q.push(v);
      }
    }
  }
  return d;
}

inline bool connected(const Adjacency& g) { return g.empty() || bfs_hops(g, g.begin()->first).size() == g.size(); }

/// Random positions forming a connected unit-disk graph with the default
/// 100 m radio, inside a box of `side` metres.
inline std::vector<Vec2> random_connected_positions(RngStream& rng, int n, double side) {
  const RadioParams radio;
  for (;;) {
    std::vector<Vec2> pos;
    for (int i = 0; i < n; ++i) pos.push_back({rng.uniform(1.0, side), rng.uniform(1.0, side)});
    if (connected(geometric_graph(pos, radio))) return pos;
  }
}

/// Two-hop cover oracle computed from the raw graph.
struct MprOracle {
  std::set<NodeId> neighbors;
  std::set<NodeId> two_hop;        // distance exactly 2 from self
  std::size_t min_cover_size = 0;  // exhaustive search
  std::size_t max_single_cover = 0;

  MprOracle(const Adjacency& g, NodeId self) {
    neighbors = g.at(self);
    for (NodeId n : neighbors) {
      for (NodeId m : g.at(n)) {
        if (m != self && !neighbors.contains(m)) two_hop.insert(m);
      }
    }
    const std::vector<NodeId> nb(neighbors.begin(), neighbors.end());
    for (NodeId n : nb) {
      std::size_t c = 0;
      for (NodeId m : g.at(n)) c += two_hop.contains(m);
      max_single_cover = std::max(max_single_cover, c);
    }
    min_cover_size = nb.size();
    for (std::uint32_t mask = 0; mask < (1u << nb.size()); ++mask) {
      const auto size = static_cast<std::size_t>(__builtin_popcount(mask));
      if (size >= min_cover_size) continue;
      std::set<NodeId> chosen;
      for (std::size_t i = 0; i < nb.size(); ++i) {
        if (mask & (1u << i)) chosen.insert(nb[i]);
      }
      if (covers(g, chosen)) min_cover_size = size;
    }
    if (two_hop.empty()) min_cover_size = 0;
  }

  bool covers(const Adjacency& g, const std::set<NodeId>& relays) const {
    for (NodeId t : two_hop) {
      bool hit = false;
      for (NodeId r : relays) hit |= g.at(r).contains(t);
      if (!hit) return false;
    }
    return true;
  }
};

/// The neighbor view a node would hold for `g`.
inline std::map<NodeId, std::set<NodeId>> neighbor_view(const Adjacency& g, NodeId self) {
  std::map<NodeId, std::set<NodeId>> out;
  for (NodeId n : g.at(self)) out[n] = g.at(n);
  return out;
}

/// Random connected graph on n vertices (edge probability p, resampled).
inline Adjacency random_connected_graph(RngStream& rng, int n, double p) {
  for (;;) {
    Adjacency g;
    for (NodeId i = 0; i < static_cast<NodeId>(n); ++i) g[i];
    for (NodeId i = 0; i < static_cast<NodeId>(n); ++i) {
      for (NodeId j = i + 1; j < static_cast<NodeId>(n); ++j) {
        if (rng.uniform01() < p) {
          g[i].insert(j);
          g[j].insert(i);
        }
      }
    }
    if (connected(g)) return g;
  }
}

/// Bordercast stages an ideal zone-routing query needs from src to dst:
/// each stage hands the query to the not yet queried peripheral nodes
/// (exactly `radius` hops) of the current frontier. -1 if unreachable.
inline int bordercast_stages(const Adjacency& g, NodeId src, NodeId dst, int radius) {
  auto zone = [&](NodeId c) { return bfs_hops(g, c); };
  std::set<NodeId> queried{src};
  std::set<NodeId> frontier{src};
  for (int stage = 0;; ++stage) {
    std::set<NodeId> next;
    for (NodeId f : frontier) {
      for (const auto& [node, d] : zone(f)) {
        if (node == dst && d <= radius) return stage;
        if (d == radius && !queried.contains(node)) next.insert(node);
      }
    }
    if (next.empty()) return -1;
    queried.insert(next.begin(), next.end());
    frontier = std::move(next);
  }
}

/// Square grid, `spacing` apart (90 m: four-neighbor connectivity).
inline std::vector<Vec2> grid_positions(int cols, int rows, double spacing = 90.0) {
  std::vector<Vec2> out;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) out.push_back({10.0 + spacing * c, 10.0 + spacing * r});
  }
  return out;
}

enum class Walk { Reached, NoRoute, Loop };

/// Follows next-hop pointers from src toward dst using each node's own
/// forwarding lookup.
inline Walk walk_routes(const Network& net, NodeId src, NodeId dst, std::vector<NodeId>* path = nullptr) {
  std::set<NodeId> visited;
  NodeId at = src;
  if (path) path->assign(1, src);
  while (at != dst) {
    if (!visited.insert(at).second) return Walk::Loop;
    auto r = net.node(at).agent().route_to(dst);
    if (!r) return Walk::NoRoute;
    at = r->next_hop;
    if (path) path->push_back(at);
  }
  return Walk::Reached;
}

/// One station's view for MAC-level rigs.
class RecordingUpper : public MacUpper {
 public:
  void mac_deliver(std::shared_ptr<const NetPacket> packet, NodeId from) override {
    delivered.push_back({std::move(packet), from});
  }
  void mac_unicast_failed(std::shared_ptr<const NetPacket> packet, NodeId next_hop) override {
    failed.push_back({std::move(packet), next_hop});
  }
  std::vector<std::pair<std::shared_ptr<const NetPacket>, NodeId>> delivered;
  std::vector<std::pair<std::shared_ptr<const NetPacket>, NodeId>> failed;
};

/// Channel plus one DCF per static position, without routing.
struct MacRig {
  explicit MacRig(std::vector<Vec2> positions, MacTimings timings = {}, RadioParams radio = {}, std::uint64_t seed = 7)
      : pos(std::move(positions)),
        channel(sched, radio, pos.size(), [this](NodeId n) { return pos.at(n); }),
        uppers(pos.size()) {
    RngStream root(seed);
    for (NodeId i = 0; i < pos.size(); ++i) {
      macs.push_back(std::make_unique<Dcf>(i, sched, channel, timings, root.substream(RngConcern::Backoff, i),
                                           &uppers[i]));
      channel.attach(i, macs.back().get());
    }
  }

  std::shared_ptr<const NetPacket> packet(NodeId src, NodeId dst, std::uint32_t bytes) {
    auto p = std::make_shared<NetPacket>();
    p->uid = ++uid;
    p->src = src;
    p->dst = dst;
    p->body_bytes = bytes;
    return p;
  }

  Scheduler sched;
  std::vector<Vec2> pos;
  Channel channel;
  std::vector<RecordingUpper> uppers;
  std::vector<std::unique_ptr<Dcf>> macs;
  std::uint64_t uid = 0;
};

/// Every transmission on the air together with its receiver set.
struct AirLog {
  struct Entry {
    Transmission tx;
    std::vector<NodeId> receivers;
  };
  void attach(Channel& ch) {
    ch.set_air_trace([this](const Transmission& t, const std::vector<NodeId>& r) { entries.push_back({t, r}); });
  }
  std::vector<Entry> entries;
};

}  // namespace vanetsim::testkit
