#include "vanetsim/olsr.hpp"

#include <algorithm>

namespace vanetsim {

std::set<NodeId> two_hop_set(NodeId self, const NeighborGraph& neighbors) {
  std::set<NodeId> out;
  for (const auto& [n, adj] : neighbors) {
    for (NodeId m : adj) {
      if (m != self && !neighbors.contains(m)) out.insert(m);
    }
  }
  return out;
}

std::set<NodeId> select_mprs(NodeId self, const NeighborGraph& neighbors) {
  std::set<NodeId> uncovered = two_hop_set(self, neighbors);
  std::set<NodeId> mprs;
  auto take = [&](NodeId y) {
    mprs.insert(y);
    for (NodeId m : neighbors.at(y)) uncovered.erase(m);
  };

  for (NodeId n2 : std::set<NodeId>(uncovered)) {
    NodeId sole = kWorld;
    int coverers = 0;
    for (const auto& [y, adj] : neighbors) {
      if (adj.contains(n2)) {
        ++coverers;
        sole = y;
      }
    }
    if (coverers == 1 && !mprs.contains(sole)) take(sole);
  }

  while (!uncovered.empty()) {
    NodeId best = kWorld;
    std::size_t best_cover = 0;
    std::size_t best_degree = 0;
    for (const auto& [y, adj] : neighbors) {
      if (mprs.contains(y)) continue;
      const auto cover = static_cast<std::size_t>(
          std::count_if(adj.begin(), adj.end(), [&](NodeId m) { return uncovered.contains(m); }));
      const std::size_t degree = adj.size() - (adj.contains(self) ? 1 : 0);
      // Map iteration is ascending, so strict comparisons keep the lower id.
      if (cover > best_cover || (cover == best_cover && cover > 0 && degree > best_degree)) {
        best = y;
        best_cover = cover;
        best_degree = degree;
      }
    }
    if (best == kWorld) break;  // unreachable for a well-formed graph
    take(best);
  }
  return mprs;
}

OlsrAgent::OlsrAgent(NodeServices& node, const RoutingParams& params)
    : RoutingAgent(node, params), tc_seen_(params.tc_interval * params.hold_factor) {}

void OlsrAgent::start() {
  // Random per-node phase; otherwise every node would emit at the same
  // instant and lose every HELLO to collisions.
  auto phase = [this](SimTime interval) {
    return SimTime::micros(node_.rng().uniform_int(0, interval.us() - 1));
  };
  const SimTime hello_phase = phase(params_.hello_interval);
  const SimTime tc_phase = phase(params_.tc_interval);
  node_.set_timer(hello_phase, [this] { emit_hello(); });
  node_.set_timer(tc_phase, [this] { emit_tc(); });
}

std::set<NodeId> OlsrAgent::symmetric_neighbors() const {
  std::set<NodeId> out;
  for (const auto& [id, n] : neighbors_) {
    if (is_symmetric(n)) out.insert(id);
  }
  return out;
}

std::set<NodeId> OlsrAgent::mpr_selectors() const {
  std::set<NodeId> out;
  for (const auto& [id, n] : neighbors_) {
    if (is_symmetric(n) && n.selector_until >= node_.now()) out.insert(id);
  }
  return out;
}

void OlsrAgent::emit_hello() {
  node_.set_timer(params_.hello_interval, [this] { emit_hello(); });
  purge();
  OlsrHello hello;
  for (const auto& [id, n] : neighbors_) hello.links.push_back({id, is_symmetric(n)});
  hello.mprs.assign(mprs_.begin(), mprs_.end());
  const auto bytes = hello.body_bytes();
  NetPacket p = make_control(MessageType::OlsrHello, kBroadcast, bytes, std::move(hello));
  p.ttl = 1;
  ++hellos_sent_;
  send_control(std::move(p), kBroadcast, true);
}

void OlsrAgent::emit_tc() {
  node_.set_timer(params_.tc_interval, [this] { emit_tc(); });
  purge();
  const std::set<NodeId> selectors = mpr_selectors();
  if (selectors.empty()) return;
  OlsrTc tc;
  tc.originator = node_.self();
  tc.msg_seq = ++tc_seq_;
  tc.ansn = ansn_;
  tc.advertised.assign(selectors.begin(), selectors.end());
  tc.ttl = params_.default_ttl;
  tc_seen_.seen(tc.originator, tc.msg_seq, node_.now());
  const auto bytes = tc.body_bytes();
  ++tcs_originated_;
  send_control(make_control(MessageType::OlsrTc, kBroadcast, bytes, std::move(tc)), kBroadcast, true);
}

void OlsrAgent::handle_control(const NetPacket& packet, NodeId prev_hop) {
  switch (packet.type) {
    case MessageType::OlsrHello: on_hello(std::any_cast<const OlsrHello&>(packet.body), prev_hop); break;
    case MessageType::OlsrTc: on_tc(std::any_cast<const OlsrTc&>(packet.body), prev_hop); break;
    default: ++node_.counters().control_dropped; break;
  }
}

void OlsrAgent::on_hello(const OlsrHello& msg, NodeId from) {
  const SimTime now = node_.now();
  const SimTime hold = params_.hello_interval * params_.hold_factor;
  const NodeId self = node_.self();
  Neighbor& n = neighbors_[from];
  n.heard_until = now + hold;
  n.two_hop.clear();
  bool hears_me = false;
  for (const HelloLink& link : msg.links) {
    if (link.neighbor == self) {
      hears_me = true;
    } else if (link.symmetric) {
      n.two_hop.insert(link.neighbor);
    }
  }
  n.sym_until = hears_me ? now + hold : SimTime{};
  const bool selects_me = std::find(msg.mprs.begin(), msg.mprs.end(), self) != msg.mprs.end();
  n.selector_until = selects_me ? now + hold : SimTime{};
  purge();
}

void OlsrAgent::on_tc(const OlsrTc& msg, NodeId prev_hop) {
  const SimTime now = node_.now();
  if (msg.originator == node_.self()) return;
  auto nb = neighbors_.find(prev_hop);
  if (nb == neighbors_.end() || !is_symmetric(nb->second)) {
    ++node_.counters().control_dropped;
    return;
  }
  if (tc_seen_.seen(msg.originator, msg.msg_seq, now)) return;

  auto latest = latest_ansn_.find(msg.originator);
  if (latest != latest_ansn_.end() && msg.ansn < latest->second) {
    ++node_.counters().control_dropped;
    return;
  }
  if (latest == latest_ansn_.end() || msg.ansn > latest->second) {
    std::erase_if(topology_, [&](const TopologyRecord& r) { return r.last_hop == msg.originator; });
    latest_ansn_[msg.originator] = msg.ansn;
  }
  const SimTime expires = now + params_.tc_interval * params_.hold_factor;
  for (NodeId dest : msg.advertised) {
    auto it = std::find_if(topology_.begin(), topology_.end(),
                           [&](const TopologyRecord& r) { return r.last_hop == msg.originator && r.dest == dest; });
    if (it == topology_.end()) {
      topology_.push_back({msg.originator, dest, msg.ansn, expires});
    } else {
      it->expires_at = expires;
    }
  }
  recompute();

  const bool relay = nb->second.selector_until >= now;
  if (relay && msg.ttl > 1) {
    OlsrTc fwd = msg;
    --fwd.ttl;
    const auto bytes = fwd.body_bytes();
    send_control(make_control(MessageType::OlsrTc, kBroadcast, bytes, std::move(fwd)), kBroadcast, false);
  }
}

void OlsrAgent::purge() {
  const SimTime now = node_.now();
  std::erase_if(neighbors_, [&](const auto& kv) { return kv.second.heard_until < now; });
  std::erase_if(topology_, [&](const TopologyRecord& r) { return r.expires_at < now; });
  // Symmetric and selector status also lapse with time.
  recompute();
}

void OlsrAgent::recompute() {
  NeighborGraph graph;
  for (const auto& [id, n] : neighbors_) {
    if (is_symmetric(n)) graph[id] = n.two_hop;
  }
  mprs_ = select_mprs(node_.self(), graph);

  const std::set<NodeId> selectors = mpr_selectors();
  if (selectors != last_selectors_) {
    ++ansn_;
    last_selectors_ = selectors;
  }

  Adjacency edges;
  for (const auto& [id, adj] : graph) {
    for (NodeId m : adj) {
      edges[id].insert(m);
      edges[m].insert(id);
    }
  }
  for (const TopologyRecord& r : topology_) {
    edges[r.last_hop].insert(r.dest);
    edges[r.dest].insert(r.last_hop);
  }
  // Only symmetric links may be a first hop.
  auto& own = edges[node_.self()];
  own.clear();
  for (const auto& [id, adj] : graph) own.insert(id);
  table_.clear();
  const PathTree tree(node_.self(), edges);
  for (const auto& [dest, r] : tree.reach()) {
    table_.put(RouteEntry{dest, r.first_hop, 0, r.hops, SimTime::max(), true});
  }
  arm_purge();
}

void OlsrAgent::arm_purge() {
  const SimTime now = node_.now();
  SimTime next = SimTime::max();
  auto consider = [&](SimTime t) {
    if (t >= now && t < next) next = t;
  };
  for (const auto& [id, n] : neighbors_) {
    consider(n.heard_until);
    consider(n.sym_until);
    consider(n.selector_until);
  }
  for (const TopologyRecord& r : topology_) consider(r.expires_at);
  if (next == SimTime::max() || next == purge_at_) return;
  node_.cancel_timer(purge_timer_);
  purge_at_ = next;
  // State valid at `next` lapses one tick later.
  purge_timer_ = node_.set_timer(next - now + SimTime::micros(1), [this] {
    purge_timer_ = kNoTicket;
    purge_at_ = SimTime::max();
    purge();
  });
}

void OlsrAgent::on_route_miss(NetPacket /*packet*/) { ++node_.counters().no_route_drops; }

void OlsrAgent::on_link_failure(NodeId neighbor, const NetPacket& packet) {
  ++node_.counters().link_failures;
  if (packet.type == MessageType::Data) ++node_.counters().link_drops;
  if (neighbors_.erase(neighbor) > 0) recompute();
}

}  // namespace vanetsim
