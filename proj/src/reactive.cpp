#include "vanetsim/reactive.hpp"

#include <vector>

namespace vanetsim {

namespace {
constexpr std::uint32_t kErrorBaseBytes = 4;
constexpr std::uint32_t kErrorPerDest = 8;
}  // namespace

void ReactiveAgent::on_route_miss(NetPacket packet) {
  const NodeId dest = packet.dst;
  if (packet.src != node_.self()) {
    ++node_.counters().no_route_drops;
    const RouteEntry* stale = table_.find(dest);
    broadcast_error({{dest, stale ? stale->seq_no : 0}}, true);
    return;
  }
  auto& drops = node_.counters().pending_drops;
  if (!pending_.push(std::move(packet), node_.now(), &drops)) ++drops;
  if (!discoveries_.contains(dest)) {
    ++node_.counters().discoveries;
    discoveries_[dest] = Discovery{};
    attempt(dest);
  }
}

void ReactiveAgent::attempt(NodeId dest) {
  Discovery& d = discoveries_[dest];
  ++d.attempts;
  const SimTime wait = params_.discovery_wait * (std::int64_t{1} << (d.attempts - 1));
  d.timer = node_.set_timer(wait, [this, dest] { on_discovery_timeout(dest); });
  send_discovery(dest, d.attempts);
}

void ReactiveAgent::on_discovery_timeout(NodeId dest) {
  auto it = discoveries_.find(dest);
  if (it == discoveries_.end()) return;
  it->second.timer = kNoTicket;
  if (route_to(dest)) {
    route_found(dest);
    return;
  }
  if (it->second.attempts <= params_.discovery_retries) {
    attempt(dest);
    return;
  }
  node_.counters().pending_drops += pending_.drop(dest);
  discoveries_.erase(it);
}

void ReactiveAgent::route_found(NodeId dest) {
  auto it = discoveries_.find(dest);
  if (it != discoveries_.end()) {
    if (it->second.timer != kNoTicket) node_.cancel_timer(it->second.timer);
    discoveries_.erase(it);
  }
  for (NetPacket& p : pending_.take(dest, node_.now(), &node_.counters().pending_drops)) {
    forward_data(std::move(p));
  }
}

void ReactiveAgent::resolve_pending() {
  std::vector<NodeId> ready;
  for (const auto& [dest, d] : discoveries_) {
    if (route_to(dest)) ready.push_back(dest);
  }
  for (NodeId dest : ready) route_found(dest);
}

void ReactiveAgent::broadcast_error(std::vector<std::pair<NodeId, std::uint32_t>> lost, bool originated) {
  if (lost.empty()) return;
  const auto bytes = kErrorBaseBytes + kErrorPerDest * static_cast<std::uint32_t>(lost.size());
  NetPacket p = make_control(error_type(), kBroadcast, bytes, RouteError{std::move(lost)});
  p.ttl = 1;
  send_control(std::move(p), kBroadcast, originated);
}

void ReactiveAgent::process_error(const RouteError& msg, NodeId prev_hop) {
  std::vector<std::pair<NodeId, std::uint32_t>> lost;
  for (const auto& [dest, seq] : msg.unreachable) {
    const RouteEntry* e = table_.find(dest);
    if (!e || !e->valid || e->next_hop != prev_hop) continue;
    table_.invalidate_with(dest, seq);
    lost.emplace_back(dest, table_.find(dest)->seq_no);
  }
  broadcast_error(std::move(lost), false);
}

void ReactiveAgent::on_link_failure(NodeId neighbor, const NetPacket& packet) {
  ++node_.counters().link_failures;
  if (packet.type == MessageType::Data) ++node_.counters().link_drops;
  broadcast_error(table_.invalidate_via(neighbor), true);
}

}  // namespace vanetsim
