#include "vanetsim/aodv.hpp"

namespace vanetsim {

namespace {
constexpr std::uint32_t kRreqBytes = 24;
constexpr std::uint32_t kRrepBytes = 20;
}  // namespace

AodvAgent::AodvAgent(NodeServices& node, const RoutingParams& params)
    : ReactiveAgent(node, params), rreq_seen_(params.duplicate_horizon) {}

void AodvAgent::send_discovery(NodeId dest, int /*attempt*/) {
  ++own_seq_;
  AodvRreq rreq;
  rreq.rreq_id = ++next_rreq_id_;
  rreq.orig = node_.self();
  rreq.orig_seq = own_seq_;
  rreq.dest = dest;
  if (const RouteEntry* known = table_.find(dest)) rreq.dest_seq = known->seq_no;
  rreq.ttl = params_.rreq_ttl;
  rreq_seen_.seen(rreq.orig, rreq.rreq_id, node_.now());
  send_control(make_control(MessageType::AodvRreq, kBroadcast, kRreqBytes, rreq), kBroadcast, true);
}

void AodvAgent::handle_control(const NetPacket& packet, NodeId prev_hop) {
  switch (packet.type) {
    case MessageType::AodvRreq: process_rreq(std::any_cast<const AodvRreq&>(packet.body), prev_hop); break;
    case MessageType::AodvRrep: process_rrep(std::any_cast<const AodvRrep&>(packet.body), prev_hop); break;
    case MessageType::AodvRerr: process_error(std::any_cast<const AodvRerr&>(packet.body), prev_hop); break;
    default: ++node_.counters().control_dropped; break;
  }
  resolve_pending();
}

void AodvAgent::process_rreq(const AodvRreq& msg, NodeId prev_hop) {
  const SimTime now = node_.now();
  if (msg.orig == node_.self()) return;
  if (rreq_seen_.seen(msg.orig, msg.rreq_id, now)) return;

  RouteEntry reverse{msg.orig, prev_hop, msg.orig_seq, msg.hop_count + 1, now + params_.route_lifetime, true};
  if (!table_.update_if_fresher(reverse)) {
    const RouteEntry* e = table_.find(msg.orig);
    if (e && e->valid && e->next_hop == prev_hop) table_.refresh(msg.orig, now + params_.route_lifetime);
  }

  if (msg.dest == node_.self()) {
    if (msg.dest_seq && *msg.dest_seq > own_seq_) own_seq_ = *msg.dest_seq;
    send_rrep(AodvRrep{msg.orig, node_.self(), own_seq_, 0});
    return;
  }
  if (auto cached = table_.lookup(msg.dest, now); cached && (!msg.dest_seq || cached->seq_no >= *msg.dest_seq)) {
    send_rrep(AodvRrep{msg.orig, msg.dest, cached->seq_no, cached->hop_count});
    return;
  }
  if (msg.ttl - 1 <= 0) return;
  AodvRreq fwd = msg;
  ++fwd.hop_count;
  --fwd.ttl;
  send_control(make_control(MessageType::AodvRreq, kBroadcast, kRreqBytes, fwd), kBroadcast, false);
}

void AodvAgent::send_rrep(const AodvRrep& msg) {
  auto back = table_.lookup(msg.orig, node_.now());
  if (!back) {
    ++node_.counters().control_dropped;
    return;
  }
  send_control(make_control(MessageType::AodvRrep, back->next_hop, kRrepBytes, msg), back->next_hop, true);
}

void AodvAgent::process_rrep(const AodvRrep& msg, NodeId prev_hop) {
  const SimTime now = node_.now();
  RouteEntry forward{msg.dest, prev_hop, msg.dest_seq, msg.hop_count + 1, now + params_.route_lifetime, true};
  const bool accepted = table_.update_if_fresher(forward);
  if (msg.orig == node_.self()) return;  // resolve_pending() flushes the buffer
  if (!accepted) {
    ++node_.counters().control_dropped;
    return;
  }
  auto back = table_.lookup(msg.orig, now);
  if (!back) {
    ++node_.counters().control_dropped;
    return;
  }
  table_.refresh(msg.orig, now + params_.route_lifetime);
  AodvRrep fwd = msg;
  ++fwd.hop_count;
  send_control(make_control(MessageType::AodvRrep, back->next_hop, kRrepBytes, fwd), back->next_hop, false);
}

}  // namespace vanetsim
