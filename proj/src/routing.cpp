#include "vanetsim/routing.hpp"

#include <algorithm>
#include <numeric>

namespace vanetsim {

std::string_view to_string(MessageType t) {
  switch (t) {
    case MessageType::Data: return "data";
    case MessageType::AodvRreq: return "aodv_rreq";
    case MessageType::AodvRrep: return "aodv_rrep";
    case MessageType::AodvRerr: return "aodv_rerr";
    case MessageType::DymoRreq: return "dymo_rreq";
    case MessageType::DymoRrep: return "dymo_rrep";
    case MessageType::DymoRerr: return "dymo_rerr";
    case MessageType::OlsrHello: return "olsr_hello";
    case MessageType::OlsrTc: return "olsr_tc";
    case MessageType::IarpUpdate: return "iarp_update";
    case MessageType::IerpQuery: return "ierp_query";
    case MessageType::IerpReply: return "ierp_reply";
    case MessageType::IerpError: return "ierp_error";
  }
  return "?";
}

std::string_view to_string(FrameKind k) {
  switch (k) {
    case FrameKind::Rts: return "RTS";
    case FrameKind::Cts: return "CTS";
    case FrameKind::Data: return "DATA";
    case FrameKind::Ack: return "ACK";
  }
  return "?";
}

std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::Aodv: return "aodv";
    case Protocol::Dymo: return "dymo";
    case Protocol::Olsr: return "olsr";
    case Protocol::Zrp: return "zrp";
  }
  return "?";
}

std::optional<Protocol> parse_protocol(std::string_view s) {
  for (Protocol p : {Protocol::Aodv, Protocol::Dymo, Protocol::Olsr, Protocol::Zrp}) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

// ---- RouteTable ------------------------------------------------------------

std::optional<RouteEntry> RouteTable::lookup(NodeId dest, SimTime now) const {
  auto it = routes_.find(dest);
  if (it == routes_.end()) return std::nullopt;
  const RouteEntry& e = it->second;
  if (!e.valid || e.expires_at < now) return std::nullopt;
  return e;
}

bool RouteTable::update_if_fresher(const RouteEntry& candidate) {
  auto it = routes_.find(candidate.dest);
  if (it == routes_.end()) {
    routes_.emplace(candidate.dest, candidate);
    return true;
  }
  RouteEntry& existing = it->second;
  const bool fresher = candidate.seq_no > existing.seq_no;
  const bool shorter = candidate.seq_no == existing.seq_no && candidate.hop_count < existing.hop_count;
  const bool revive = candidate.seq_no == existing.seq_no && !existing.valid;
  if (!(fresher || shorter || revive)) return false;
  existing = candidate;
  return true;
}

void RouteTable::refresh(NodeId dest, SimTime until) {
  auto it = routes_.find(dest);
  if (it != routes_.end() && it->second.valid && it->second.expires_at < until) it->second.expires_at = until;
}

std::vector<std::pair<NodeId, std::uint32_t>> RouteTable::invalidate_via(NodeId next_hop) {
  std::vector<std::pair<NodeId, std::uint32_t>> lost;
  for (auto& [dest, e] : routes_) {
    if (e.valid && e.next_hop == next_hop) {
      e.valid = false;
      ++e.seq_no;
      lost.emplace_back(dest, e.seq_no);
    }
  }
  return lost;
}

bool RouteTable::invalidate(NodeId dest) {
  auto it = routes_.find(dest);
  if (it == routes_.end() || !it->second.valid) return false;
  it->second.valid = false;
  ++it->second.seq_no;
  return true;
}

bool RouteTable::invalidate_with(NodeId dest, std::uint32_t seq) {
  auto it = routes_.find(dest);
  if (it == routes_.end() || !it->second.valid) return false;
  it->second.valid = false;
  it->second.seq_no = std::max(it->second.seq_no, seq);
  return true;
}

const RouteEntry* RouteTable::find(NodeId dest) const {
  auto it = routes_.find(dest);
  return it == routes_.end() ? nullptr : &it->second;
}

std::vector<RouteEntry> RouteTable::active(SimTime now) const {
  std::vector<RouteEntry> out;
  for (const auto& [dest, e] : routes_) {
    if (e.valid && e.expires_at >= now) out.push_back(e);
  }
  return out;
}

std::uint64_t RoutingCounters::total_control_sent() const {
  return std::accumulate(control_sent.begin(), control_sent.end(), std::uint64_t{0});
}

// ---- RoutingAgent ----------------------------------------------------------

std::optional<RouteEntry> RoutingAgent::route_to(NodeId dest) const { return table_.lookup(dest, node_.now()); }

void RoutingAgent::handle_app_packet(NetPacket packet) {
  ++node_.counters().data_originated;
  forward_data(std::move(packet));
}

void RoutingAgent::handle_packet(const NetPacket& packet, NodeId prev_hop) {
  if (is_control(packet.type)) {
    handle_control(packet, prev_hop);
    return;
  }
  NetPacket copy = packet;
  if (copy.dst != node_.self()) {
    if (--copy.ttl <= 0) {
      ++node_.counters().ttl_drops;
      return;
    }
    ++node_.counters().data_forwarded;
  }
  forward_data(std::move(copy));
}

void RoutingAgent::forward_data(NetPacket packet) {
  if (packet.dst == node_.self()) {
    ++node_.counters().data_delivered;
    node_.deliver(packet);
    return;
  }
  if (packet.ttl <= 0) {
    ++node_.counters().ttl_drops;
    return;
  }
  if (auto route = route_to(packet.dst)) {
    table_.refresh(packet.dst, node_.now() + params_.route_lifetime);
    node_.send(std::move(packet), route->next_hop);
    return;
  }
  on_route_miss(std::move(packet));
}

void RoutingAgent::send_control(NetPacket packet, NodeId next_hop, bool originated) {
  const auto idx = static_cast<std::size_t>(packet.type);
  ++node_.counters().control_sent[idx];
  if (originated) ++node_.counters().control_originated[idx];
  node_.send(std::move(packet), next_hop);
}

NetPacket RoutingAgent::make_control(MessageType type, NodeId dst, std::uint32_t bytes, std::any body) const {
  NetPacket p;
  p.uid = node_.new_uid();
  p.src = node_.self();
  p.dst = dst;
  p.ttl = params_.default_ttl;
  p.type = type;
  p.body_bytes = bytes;
  p.body = std::move(body);
  return p;
}

// ---- PendingBuffer ---------------------------------------------------------

bool PendingBuffer::push(NetPacket packet, SimTime now, std::uint64_t* expired) {
  auto& q = items_[packet.dst];
  while (!q.empty() && q.front().queued + lifetime_ < now) {
    q.pop_front();
    if (expired) ++*expired;
  }
  if (q.size() >= per_dest_) return false;
  q.push_back({std::move(packet), now});
  return true;
}

std::vector<NetPacket> PendingBuffer::take(NodeId dest, SimTime now, std::uint64_t* expired) {
  std::vector<NetPacket> out;
  auto it = items_.find(dest);
  if (it == items_.end()) return out;
  for (auto& item : it->second) {
    if (item.queued + lifetime_ < now) {
      if (expired) ++*expired;
      continue;
    }
    out.push_back(std::move(item.packet));
  }
  items_.erase(it);
  return out;
}

std::size_t PendingBuffer::drop(NodeId dest) {
  auto it = items_.find(dest);
  if (it == items_.end()) return 0;
  const std::size_t n = it->second.size();
  items_.erase(it);
  return n;
}

bool PendingBuffer::has(NodeId dest) const {
  auto it = items_.find(dest);
  return it != items_.end() && !it->second.empty();
}

std::size_t PendingBuffer::size(NodeId dest) const {
  auto it = items_.find(dest);
  return it == items_.end() ? 0 : it->second.size();
}

// ---- DuplicateCache --------------------------------------------------------

bool DuplicateCache::seen(NodeId orig, std::uint64_t id, SimTime now) {
  if (now - last_purge_ > horizon_) {
    std::erase_if(seen_, [&](const auto& kv) { return kv.second + horizon_ < now; });
    last_purge_ = now;
  }
  auto [it, inserted] = seen_.try_emplace({orig, id}, now);
  if (inserted) return false;
  if (it->second + horizon_ < now) {
    it->second = now;
    return false;
  }
  return true;
}

// ---- PathTree --------------------------------------------------------------

PathTree::PathTree(NodeId root, const Adjacency& adj, std::uint32_t max_depth) : root_(root) {
  std::vector<NodeId> frontier{root};
  for (std::uint32_t depth = 0; depth < max_depth && !frontier.empty(); ++depth) {
    std::set<NodeId> next;
    for (NodeId u : frontier) {
      auto it = adj.find(u);
      if (it == adj.end()) continue;
      const NodeId via = u == root ? kWorld : reach_.at(u).first_hop;
      for (NodeId v : it->second) {
        if (v == root) continue;
        const NodeId fh = u == root ? v : via;
        auto [slot, inserted] = reach_.try_emplace(v, Reach{fh, u, depth + 1});
        if (inserted) {
          next.insert(v);
        } else if (slot->second.hops == depth + 1 &&
                   (fh < slot->second.first_hop || (fh == slot->second.first_hop && u < slot->second.parent))) {
          slot->second.first_hop = fh;
          slot->second.parent = u;
        }
      }
    }
    frontier.assign(next.begin(), next.end());
  }
}

const PathTree::Reach* PathTree::find(NodeId dest) const {
  auto it = reach_.find(dest);
  return it == reach_.end() ? nullptr : &it->second;
}

std::vector<NodeId> PathTree::path_to(NodeId dest) const {
  if (dest == root_) return {root_};
  if (!reach_.contains(dest)) return {};
  std::vector<NodeId> path;
  for (NodeId n = dest; n != root_; n = reach_.at(n).parent) path.push_back(n);
  path.push_back(root_);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace vanetsim
