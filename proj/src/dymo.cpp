#include "vanetsim/dymo.hpp"

#include <algorithm>

namespace vanetsim {

DymoAgent::DymoAgent(NodeServices& node, const RoutingParams& params)
    : ReactiveAgent(node, params), rreq_seen_(params.duplicate_horizon) {}

void DymoAgent::send_discovery(NodeId dest, int /*attempt*/) {
  DymoMessage msg;
  msg.is_request = true;
  msg.target = dest;
  msg.orig = node_.self();
  msg.path.push_back({node_.self(), ++own_seq_, 0});
  msg.ttl = params_.rreq_ttl;
  rreq_seen_.seen(msg.orig, msg.path.front().seq, node_.now());
  const auto bytes = msg.body_bytes();
  send_control(make_control(MessageType::DymoRreq, kBroadcast, bytes, std::move(msg)), kBroadcast, true);
}

void DymoAgent::handle_control(const NetPacket& packet, NodeId prev_hop) {
  switch (packet.type) {
    case MessageType::DymoRreq:
    case MessageType::DymoRrep: process(std::any_cast<const DymoMessage&>(packet.body), prev_hop); break;
    case MessageType::DymoRerr: process_error(std::any_cast<const DymoRerr&>(packet.body), prev_hop); break;
    default: ++node_.counters().control_dropped; break;
  }
  resolve_pending();
}

void DymoAgent::install_path(const DymoMessage& msg, NodeId prev_hop) {
  const SimTime expires = node_.now() + params_.route_lifetime;
  const std::uint32_t last = msg.path.back().hops;
  for (const PathEntry& e : msg.path) {
    RouteEntry candidate{e.node, prev_hop, e.seq, last + 1 - e.hops, expires, true};
    if (!table_.update_if_fresher(candidate)) {
      const RouteEntry* cur = table_.find(e.node);
      if (cur && cur->valid && cur->next_hop == prev_hop) table_.refresh(e.node, expires);
    }
  }
}

void DymoAgent::process(const DymoMessage& msg, NodeId prev_hop) {
  const NodeId self = node_.self();
  if (msg.path.empty()) {
    ++node_.counters().control_dropped;
    return;
  }
  if (std::any_of(msg.path.begin(), msg.path.end(), [self](const PathEntry& e) { return e.node == self; })) {
    ++node_.counters().loop_drops;
    return;
  }
  if (msg.is_request && rreq_seen_.seen(msg.orig, msg.path.front().seq, node_.now())) return;

  install_path(msg, prev_hop);

  if (msg.is_request) {
    if (msg.target == self) {
      DymoMessage reply;
      reply.is_request = false;
      reply.target = msg.orig;
      reply.orig = self;
      reply.path.push_back({self, ++own_seq_, 0});
      reply.ttl = params_.rreq_ttl;
      unicast_toward(std::move(reply), msg.orig, true);
      return;
    }
    if (msg.ttl - 1 <= 0) return;
    DymoMessage fwd = msg;
    --fwd.ttl;
    fwd.path.push_back({self, ++own_seq_, msg.path.back().hops + 1});
    const auto bytes = fwd.body_bytes();
    send_control(make_control(MessageType::DymoRreq, kBroadcast, bytes, std::move(fwd)), kBroadcast, false);
    return;
  }

  if (msg.target == self) return;  // routes installed; resolve_pending() flushes
  DymoMessage fwd = msg;
  --fwd.ttl;
  fwd.path.push_back({self, ++own_seq_, msg.path.back().hops + 1});
  unicast_toward(std::move(fwd), msg.target, false);
}

void DymoAgent::unicast_toward(DymoMessage msg, NodeId toward, bool originated) {
  auto route = table_.lookup(toward, node_.now());
  if (!route || msg.ttl <= 0) {
    ++node_.counters().control_dropped;
    return;
  }
  const auto bytes = msg.body_bytes();
  send_control(make_control(MessageType::DymoRrep, route->next_hop, bytes, std::move(msg)), route->next_hop,
               originated);
}

}  // namespace vanetsim
