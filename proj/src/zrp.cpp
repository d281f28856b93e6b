#include "vanetsim/zrp.hpp"

#include <algorithm>

namespace vanetsim {

namespace {
bool contains(const std::vector<NodeId>& v, NodeId n) { return std::find(v.begin(), v.end(), n) != v.end(); }
}  // namespace

ZrpAgent::ZrpAgent(NodeServices& node, const RoutingParams& params)
    : ReactiveAgent(node, params), update_seen_(params.iarp_hold), query_seen_(params.duplicate_horizon) {}

void ZrpAgent::start() {
  // Per-node phase, as for OLSR HELLOs.
  const SimTime phase = SimTime::micros(node_.rng().uniform_int(0, params_.iarp_interval.us() - 1));
  node_.set_timer(phase, [this] { emit_update(); });
}

std::optional<RouteEntry> ZrpAgent::route_to(NodeId dest) const {
  if (auto zone = zone_routes_.lookup(dest, node_.now())) return zone;
  return table_.lookup(dest, node_.now());
}

// ---- IARP ------------------------------------------------------------------

void ZrpAgent::emit_update() {
  node_.set_timer(params_.iarp_interval, [this] { emit_update(); });
  purge();
  recompute();
  IarpUpdate msg;
  msg.origin = node_.self();
  msg.seq = ++update_seq_;
  for (const auto& [n, until] : heard_) msg.neighbors.push_back(n);
  msg.ttl = params_.zone_radius;
  update_seen_.seen(msg.origin, msg.seq, node_.now());
  const auto bytes = msg.body_bytes();
  NetPacket p = make_control(MessageType::IarpUpdate, kBroadcast, bytes, std::move(msg));
  p.ttl = params_.zone_radius;
  send_control(std::move(p), kBroadcast, true);
}

void ZrpAgent::on_update(const IarpUpdate& msg, NodeId prev_hop) {
  const SimTime now = node_.now();
  if (msg.origin == node_.self()) return;
  if (update_seen_.seen(msg.origin, msg.seq, now)) return;
  const SimTime until = now + params_.iarp_hold;
  if (prev_hop == msg.origin) heard_[msg.origin] = until;
  link_state_[msg.origin] = LinkState{{msg.neighbors.begin(), msg.neighbors.end()}, until};
  purge();
  recompute();
  if (msg.ttl - 1 > 0) {
    IarpUpdate fwd = msg;
    --fwd.ttl;
    const auto bytes = fwd.body_bytes();
    NetPacket p = make_control(MessageType::IarpUpdate, kBroadcast, bytes, std::move(fwd));
    p.ttl = 1;
    send_control(std::move(p), kBroadcast, false);
  }
}

void ZrpAgent::purge() {
  const SimTime now = node_.now();
  std::erase_if(heard_, [&](const auto& kv) { return kv.second < now; });
  std::erase_if(link_state_, [&](const auto& kv) { return kv.second.expires_at < now; });
}

void ZrpAgent::recompute() {
  const NodeId self = node_.self();
  auto lists = [&](NodeId u, NodeId v) {
    if (u == self) return heard_.contains(v);
    auto it = link_state_.find(u);
    return it != link_state_.end() && it->second.neighbors.contains(v);
  };
  zone_graph_.clear();
  for (const auto& [u, ls] : link_state_) {
    for (NodeId v : ls.neighbors) {
      if (lists(v, u)) {
        zone_graph_[u].insert(v);
        zone_graph_[v].insert(u);
      }
    }
  }
  zone_routes_.clear();
  peripheral_.clear();
  const auto radius = static_cast<std::uint32_t>(params_.zone_radius);
  const PathTree tree(self, zone_graph_, radius);
  for (const auto& [dest, r] : tree.reach()) {
    zone_routes_.put(RouteEntry{dest, r.first_hop, 0, r.hops, SimTime::max(), true});
    if (r.hops == radius) peripheral_.insert(dest);
  }
}

// ---- IERP ------------------------------------------------------------------

void ZrpAgent::on_route_miss(NetPacket packet) {
  if (packet.src == node_.self()) {
    ReactiveAgent::on_route_miss(std::move(packet));
    return;
  }
  ++node_.counters().no_route_drops;
  notify_source(packet.src, {packet.dst}, true);
}

void ZrpAgent::send_discovery(NodeId dest, int /*attempt*/) {
  IerpQuery q;
  q.orig = node_.self();
  q.query_id = ++query_seq_;
  q.dest = dest;
  q.route = {node_.self()};
  q.stage = 1;
  query_seen_.seen(q.orig, q.query_id, node_.now());
  bordercast(q, true);
}

void ZrpAgent::bordercast(const IerpQuery& msg, bool originated) {
  for (NodeId p : peripheral_) {
    if (contains(msg.route, p)) continue;
    NetPacket pkt = make_control(MessageType::IerpQuery, p, msg.body_bytes(), msg);
    pkt.src = msg.orig;
    send_toward(std::move(pkt), originated);
  }
}

void ZrpAgent::send_toward(NetPacket packet, bool originated) {
  auto route = route_to(packet.dst);
  if (!route) {
    ++node_.counters().control_dropped;
    return;
  }
  const NodeId next = route->next_hop;
  send_control(std::move(packet), next, originated);
}

void ZrpAgent::handle_control(const NetPacket& packet, NodeId prev_hop) {
  switch (packet.type) {
    case MessageType::IarpUpdate: on_update(std::any_cast<const IarpUpdate&>(packet.body), prev_hop); break;
    case MessageType::IerpQuery: on_query(std::any_cast<const IerpQuery&>(packet.body), packet.dst); break;
    case MessageType::IerpReply: on_reply(std::any_cast<const IerpReply&>(packet.body), false); break;
    case MessageType::IerpError: on_error(std::any_cast<const IerpError&>(packet.body), prev_hop); break;
    default: ++node_.counters().control_dropped; break;
  }
  resolve_pending();
}

void ZrpAgent::on_query(IerpQuery msg, NodeId dst) {
  const NodeId self = node_.self();
  if (contains(msg.route, self)) {
    ++node_.counters().loop_drops;
    return;
  }
  msg.route.push_back(self);
  if (dst != self) {
    // Relay inside the bordercaster's zone.
    NetPacket pkt = make_control(MessageType::IerpQuery, dst, msg.body_bytes(), std::move(msg));
    pkt.src = std::any_cast<const IerpQuery&>(pkt.body).orig;
    send_toward(std::move(pkt), false);
    return;
  }
  if (msg.orig == self || query_seen_.seen(msg.orig, msg.query_id, node_.now())) return;

  if (msg.dest == self || in_zone(msg.dest)) {
    IerpReply reply;
    reply.orig = msg.orig;
    reply.dest = msg.dest;
    reply.route = msg.route;
    if (msg.dest != self) {
      const std::vector<NodeId> tail = PathTree(self, zone_graph_, static_cast<std::uint32_t>(params_.zone_radius))
                                           .path_to(msg.dest);
      reply.route.insert(reply.route.end(), tail.begin() + 1, tail.end());
    }
    reply.stage = msg.stage;
    on_reply(reply, true);
    return;
  }
  if (msg.stage + 1 > params_.ierp_max_stages) {
    ++node_.counters().control_dropped;
    return;
  }
  ++msg.stage;
  bordercast(msg, false);
}

void ZrpAgent::install(NodeId dest, NodeId next_hop, std::uint32_t hops) {
  const RouteEntry* cur = table_.find(dest);
  const SimTime expires = node_.now() + params_.route_lifetime;
  if (cur && cur->valid && cur->expires_at >= node_.now() && cur->hop_count <= hops) {
    if (cur->next_hop == next_hop) table_.refresh(dest, expires);
    return;
  }
  table_.put(RouteEntry{dest, next_hop, cur ? cur->seq_no : 0, hops, expires, true});
}

void ZrpAgent::on_reply(const IerpReply& msg, bool originated) {
  const NodeId self = node_.self();
  auto it = std::find(msg.route.begin(), msg.route.end(), self);
  if (it == msg.route.end() || msg.route.size() < 2) {
    ++node_.counters().control_dropped;
    return;
  }
  const auto i = static_cast<std::size_t>(it - msg.route.begin());
  const std::size_t last = msg.route.size() - 1;
  if (i < last) install(msg.dest, msg.route[i + 1], static_cast<std::uint32_t>(last - i));
  if (i == 0) {
    last_stages_ = msg.stage;
    return;
  }
  install(msg.orig, msg.route[i - 1], static_cast<std::uint32_t>(i));
  NetPacket pkt = make_control(MessageType::IerpReply, msg.orig, msg.body_bytes(), msg);
  send_control(std::move(pkt), msg.route[i - 1], originated);
}

void ZrpAgent::notify_source(NodeId source, std::vector<NodeId> lost, bool originated) {
  if (lost.empty() || source == node_.self()) return;
  IerpError err{source, std::move(lost)};
  const auto bytes = err.body_bytes();
  send_toward(make_control(MessageType::IerpError, source, bytes, std::move(err)), originated);
}

void ZrpAgent::on_error(const IerpError& msg, NodeId prev_hop) {
  for (NodeId dest : msg.unreachable) {
    const RouteEntry* e = table_.find(dest);
    if (e && e->valid && e->next_hop == prev_hop) table_.invalidate(dest);
  }
  if (msg.notify != node_.self()) notify_source(msg.notify, msg.unreachable, false);
}

void ZrpAgent::on_link_failure(NodeId neighbor, const NetPacket& packet) {
  ++node_.counters().link_failures;
  if (packet.type == MessageType::Data) ++node_.counters().link_drops;
  heard_.erase(neighbor);
  recompute();
  std::vector<NodeId> lost;
  for (const auto& [dest, seq] : table_.invalidate_via(neighbor)) lost.push_back(dest);
  if (packet.type == MessageType::Data) notify_source(packet.src, std::move(lost), true);
}

}  // namespace vanetsim
