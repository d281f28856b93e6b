#pragma once

#include <map>
#include <set>
#include <vector>

#include "vanetsim/routing.hpp"

namespace vanetsim {

struct HelloLink {
  NodeId neighbor = 0;
  bool symmetric = false;
};

struct OlsrHello {
  std::vector<HelloLink> links;
  std::vector<NodeId> mprs;

  std::uint32_t body_bytes() const { return 4 + 4 * static_cast<std::uint32_t>(links.size() + mprs.size()); }
};

struct OlsrTc {
  NodeId originator = 0;
  std::uint32_t msg_seq = 0;
  std::uint32_t ansn = 0;
  std::vector<NodeId> advertised;
  int ttl = 0;

  std::uint32_t body_bytes() const { return 12 + 4 * static_cast<std::uint32_t>(advertised.size()); }
};

/// Symmetric neighbors of the selecting node, each with its own symmetric
/// neighbor set (which may include the selecting node and other one-hop
/// nodes; both are ignored as cover targets).
using NeighborGraph = std::map<NodeId, std::set<NodeId>>;

/// Strict two-hop set implied by `neighbors`.
std::set<NodeId> two_hop_set(NodeId self, const NeighborGraph& neighbors);

/// Greedy relay selection: sole coverers first, then the neighbor covering
/// the most uncovered two-hop nodes, ties to higher degree then lower id.
std::set<NodeId> select_mprs(NodeId self, const NeighborGraph& neighbors);

struct TopologyRecord {
  NodeId last_hop = 0;
  NodeId dest = 0;
  std::uint32_t ansn = 0;
  SimTime expires_at;
};

class OlsrAgent : public RoutingAgent {
 public:
  OlsrAgent(NodeServices& node, const RoutingParams& params);

  Protocol protocol() const override { return Protocol::Olsr; }
  void start() override;
  void on_link_failure(NodeId neighbor, const NetPacket& packet) override;

  std::set<NodeId> symmetric_neighbors() const;
  const std::set<NodeId>& mpr_set() const { return mprs_; }
  std::set<NodeId> mpr_selectors() const;
  std::uint32_t ansn() const { return ansn_; }
  const std::vector<TopologyRecord>& topology() const { return topology_; }
  std::uint64_t hellos_sent() const { return hellos_sent_; }
  std::uint64_t tcs_originated() const { return tcs_originated_; }

 protected:
  void handle_control(const NetPacket& packet, NodeId prev_hop) override;
  void on_route_miss(NetPacket packet) override;

 private:
  struct Neighbor {
    SimTime heard_until;
    SimTime sym_until;
    SimTime selector_until;
    std::set<NodeId> two_hop;
  };

  void emit_hello();
  void emit_tc();
  void on_hello(const OlsrHello& msg, NodeId from);
  void on_tc(const OlsrTc& msg, NodeId prev_hop);
  void purge();
  void recompute();
  /// Schedules a purge for the earliest moment any held state expires.
  void arm_purge();
  bool is_symmetric(const Neighbor& n) const { return n.sym_until >= node_.now(); }

  std::map<NodeId, Neighbor> neighbors_;
  std::set<NodeId> mprs_;
  std::set<NodeId> last_selectors_;
  std::uint32_t ansn_ = 0;
  std::uint32_t tc_seq_ = 0;
  std::vector<TopologyRecord> topology_;
  std::map<NodeId, std::uint32_t> latest_ansn_;
  DuplicateCache tc_seen_;
  std::uint64_t hellos_sent_ = 0;
  std::uint64_t tcs_originated_ = 0;
  Ticket purge_timer_ = kNoTicket;
  SimTime purge_at_ = SimTime::max();
};

}  // namespace vanetsim
