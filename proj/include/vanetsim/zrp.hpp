#pragma once

#include <map>
#include <set>
#include <vector>

#include "vanetsim/reactive.hpp"

namespace vanetsim {

/// Link-state advertisement limited to the zone radius.
struct IarpUpdate {
  NodeId origin = 0;
  std::uint32_t seq = 0;
  std::vector<NodeId> neighbors;
  int ttl = 0;

  std::uint32_t body_bytes() const { return 12 + 4 * static_cast<std::uint32_t>(neighbors.size()); }
};

struct IerpQuery {
  NodeId orig = 0;
  std::uint32_t query_id = 0;
  NodeId dest = 0;
  std::vector<NodeId> route;  // originator first; every relay appends itself
  int stage = 1;              // bordercasts performed so far

  std::uint32_t body_bytes() const { return 16 + 4 * static_cast<std::uint32_t>(route.size()); }
};

struct IerpReply {
  NodeId orig = 0;
  NodeId dest = 0;
  std::vector<NodeId> route;  // full path, orig first, dest last
  int stage = 1;

  std::uint32_t body_bytes() const { return 12 + 4 * static_cast<std::uint32_t>(route.size()); }
};

/// Sent back toward a source whose interzone route broke.
struct IerpError {
  NodeId notify = 0;
  std::vector<NodeId> unreachable;

  std::uint32_t body_bytes() const { return 8 + 4 * static_cast<std::uint32_t>(unreachable.size()); }
};

/// Hybrid routing: proactive link state out to `zone_radius` hops, and
/// interzone discovery by query unicasts to the zone's peripheral nodes.
class ZrpAgent : public ReactiveAgent {
 public:
  ZrpAgent(NodeServices& node, const RoutingParams& params);

  Protocol protocol() const override { return Protocol::Zrp; }
  void start() override;
  void on_link_failure(NodeId neighbor, const NetPacket& packet) override;
  std::optional<RouteEntry> route_to(NodeId dest) const override;

  /// Routes to nodes within the zone (hop count ≤ radius).
  const RouteTable& zone_table() const { return zone_routes_; }
  const std::set<NodeId>& peripheral() const { return peripheral_; }
  bool in_zone(NodeId n) const { return zone_routes_.find(n) != nullptr; }
  /// Bordercast stages the most recent resolved discovery needed.
  int last_resolved_stages() const { return last_stages_; }

 protected:
  void handle_control(const NetPacket& packet, NodeId prev_hop) override;
  void on_route_miss(NetPacket packet) override;
  void send_discovery(NodeId dest, int attempt) override;
  MessageType error_type() const override { return MessageType::IerpError; }

 private:
  struct LinkState {
    std::set<NodeId> neighbors;
    SimTime expires_at;
  };

  void emit_update();
  void on_update(const IarpUpdate& msg, NodeId prev_hop);
  void on_query(IerpQuery msg, NodeId dst);
  void on_reply(const IerpReply& msg, bool originated);
  void on_error(const IerpError& msg, NodeId prev_hop);
  void bordercast(const IerpQuery& msg, bool originated);
  void send_toward(NetPacket packet, bool originated);
  void install(NodeId dest, NodeId next_hop, std::uint32_t hops);
  void notify_source(NodeId source, std::vector<NodeId> lost, bool originated);
  void purge();
  void recompute();

  std::map<NodeId, SimTime> heard_;
  std::map<NodeId, LinkState> link_state_;
  std::uint32_t update_seq_ = 0;
  std::uint32_t query_seq_ = 0;
  DuplicateCache update_seen_;
  DuplicateCache query_seen_;
  RouteTable zone_routes_;
  std::set<NodeId> peripheral_;
  Adjacency zone_graph_;
  int last_stages_ = 0;
};

}  // namespace vanetsim
