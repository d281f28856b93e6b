#pragma once

#include <array>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "vanetsim/engine.hpp"
#include "vanetsim/packet.hpp"

namespace vanetsim {

struct RouteEntry {
  NodeId dest = 0;
  NodeId next_hop = 0;
  std::uint32_t seq_no = 0;
  std::uint32_t hop_count = 1;
  SimTime expires_at = SimTime::max();
  bool valid = true;
};

/// Destination-keyed routes shared by every agent.
class RouteTable {
 public:
  /// The valid entry for `dest` that has not expired at `now`.
  std::optional<RouteEntry> lookup(NodeId dest, SimTime now) const;

  /// Accepts the candidate if there is no entry, it carries a higher
  /// sequence number, or an equal one with strictly fewer hops. Invalid
  /// existing entries with an equal sequence number are also replaced.
  bool update_if_fresher(const RouteEntry& candidate);

  /// Unconditional replacement (proactive recomputation).
  void put(const RouteEntry& entry) { routes_[entry.dest] = entry; }
  void clear() { routes_.clear(); }
  void erase(NodeId dest) { routes_.erase(dest); }

  /// Pushes the expiry of a valid entry to at least `until`.
  void refresh(NodeId dest, SimTime until);

  /// Marks every valid route through `next_hop` invalid, bumps its sequence
  /// number and returns the affected (dest, seq) pairs.
  std::vector<std::pair<NodeId, std::uint32_t>> invalidate_via(NodeId next_hop);
  bool invalidate(NodeId dest);
  /// Invalidates and raises the sequence number to at least `seq`.
  bool invalidate_with(NodeId dest, std::uint32_t seq);

  const RouteEntry* find(NodeId dest) const;
  const std::map<NodeId, RouteEntry>& entries() const { return routes_; }
  /// Valid, unexpired entries only.
  std::vector<RouteEntry> active(SimTime now) const;

 private:
  std::map<NodeId, RouteEntry> routes_;
};

struct RoutingCounters {
  std::uint64_t data_originated = 0;
  std::uint64_t data_forwarded = 0;
  std::uint64_t data_delivered = 0;
  std::uint64_t no_route_drops = 0;
  std::uint64_t ttl_drops = 0;
  std::uint64_t pending_drops = 0;
  std::uint64_t link_failures = 0;
  std::uint64_t link_drops = 0;
  std::uint64_t control_dropped = 0;
  std::uint64_t loop_drops = 0;
  std::uint64_t discoveries = 0;
  std::array<std::uint64_t, kMessageTypeCount> control_sent{};  // by MessageType
  std::array<std::uint64_t, kMessageTypeCount> control_originated{};

  std::uint64_t total_control_sent() const;
};

/// Everything a routing agent may touch. Agents never see positions or other
/// nodes' state: topology knowledge has to come through messages.
class NodeServices {
 public:
  virtual ~NodeServices() = default;
  virtual NodeId self() const = 0;
  virtual SimTime now() const = 0;
  /// Hands a packet to the MAC for `next_hop` (kBroadcast for one-hop flood).
  virtual void send(NetPacket packet, NodeId next_hop) = 0;
  /// Local delivery to the application.
  virtual void deliver(const NetPacket& packet) = 0;
  virtual Ticket set_timer(SimTime delay, std::function<void()> fn) = 0;
  virtual void cancel_timer(Ticket t) = 0;
  virtual RngStream& rng() = 0;
  virtual RoutingCounters& counters() = 0;
  virtual std::uint64_t new_uid() = 0;
};

/// Limits shared by the agents. Reactive timers are common to AODV, DYMO and
/// the ZRP interzone part so differences in results come from the protocols.
struct RoutingParams {
  int default_ttl = 64;
  SimTime route_lifetime = SimTime::seconds(10);
  int discovery_retries = 2;
  SimTime discovery_wait = SimTime::millis(500);
  int rreq_ttl = 35;
  SimTime duplicate_horizon = SimTime::seconds(15);
  std::size_t pending_per_dest = 5;
  SimTime pending_lifetime = SimTime::seconds(10);
  // OLSR
  SimTime hello_interval = SimTime::seconds(2);
  SimTime tc_interval = SimTime::seconds(5);
  int hold_factor = 3;
  // ZRP
  int zone_radius = 2;
  SimTime iarp_interval = SimTime::seconds(3);
  SimTime iarp_hold = SimTime::seconds(9);
  int ierp_max_stages = 8;
};

enum class Protocol : std::uint8_t { Aodv, Dymo, Olsr, Zrp };
std::string_view to_string(Protocol p);
std::optional<Protocol> parse_protocol(std::string_view s);

/// The contract every routing agent implements.
class RoutingAgent {
 public:
  RoutingAgent(NodeServices& node, const RoutingParams& params) : node_(node), params_(params) {}
  virtual ~RoutingAgent() = default;

  virtual Protocol protocol() const = 0;
  virtual void start() {}

  /// A packet originated by the local application.
  virtual void handle_app_packet(NetPacket packet);
  /// Any packet received from the MAC (control, or data to deliver/forward).
  virtual void handle_packet(const NetPacket& packet, NodeId prev_hop);
  /// The MAC exhausted its retries delivering `packet` to `neighbor`.
  virtual void on_link_failure(NodeId neighbor, const NetPacket& packet) = 0;

  const RouteTable& table() const { return table_; }
  /// Route lookup used for forwarding decisions; defaults to the table.
  virtual std::optional<RouteEntry> route_to(NodeId dest) const;

 protected:
  virtual void handle_control(const NetPacket& packet, NodeId prev_hop) = 0;
  /// Called when a data packet has no usable route. Reactive agents buffer
  /// and discover, proactive ones drop.
  virtual void on_route_miss(NetPacket packet) = 0;

  /// Delivers, forwards along an existing route, or reports a miss.
  void forward_data(NetPacket packet);
  /// Sends a control packet, counting it by type.
  void send_control(NetPacket packet, NodeId next_hop, bool originated);
  NetPacket make_control(MessageType type, NodeId dst, std::uint32_t bytes, std::any body) const;

  NodeServices& node_;
  const RoutingParams& params_;
  RouteTable table_;
};

/// Per-destination FIFO of packets awaiting a route, bounded in size and age.
class PendingBuffer {
 public:
  PendingBuffer(std::size_t per_dest, SimTime lifetime) : per_dest_(per_dest), lifetime_(lifetime) {}

  /// False if the destination's buffer is full (packet not stored). Aged-out
  /// entries are discarded first and added to `expired`.
  bool push(NetPacket packet, SimTime now, std::uint64_t* expired = nullptr);
  /// Removes and returns every unexpired packet for dest, oldest first.
  std::vector<NetPacket> take(NodeId dest, SimTime now, std::uint64_t* expired = nullptr);
  /// Drops everything for dest; returns the count.
  std::size_t drop(NodeId dest);
  bool has(NodeId dest) const;
  std::size_t size(NodeId dest) const;

 private:
  struct Item {
    NetPacket packet;
    SimTime queued;
  };
  std::size_t per_dest_;
  SimTime lifetime_;
  std::map<NodeId, std::deque<Item>> items_;
};

/// (originator, id) pairs seen recently, with a fixed horizon.
class DuplicateCache {
 public:
  explicit DuplicateCache(SimTime horizon) : horizon_(horizon) {}
  /// Records the pair; returns true if it was already present and fresh.
  bool seen(NodeId orig, std::uint64_t id, SimTime now);

 private:
  SimTime horizon_;
  std::map<std::pair<NodeId, std::uint64_t>, SimTime> seen_;
  SimTime last_purge_{};
};

using Adjacency = std::map<NodeId, std::set<NodeId>>;

/// Breadth-first tree from a root. Among equal-length paths the one with
/// the lowest first hop wins, then the lowest parent.
class PathTree {
 public:
  struct Reach {
    NodeId first_hop = 0;
    NodeId parent = 0;
    std::uint32_t hops = 0;
  };

  PathTree(NodeId root, const Adjacency& adj, std::uint32_t max_depth = std::numeric_limits<std::uint32_t>::max());

  const std::map<NodeId, Reach>& reach() const { return reach_; }
  const Reach* find(NodeId dest) const;
  /// Root first, dest last; empty if unreachable.
  std::vector<NodeId> path_to(NodeId dest) const;

 private:
  NodeId root_;
  std::map<NodeId, Reach> reach_;
};

std::unique_ptr<RoutingAgent> make_agent(Protocol p, NodeServices& node, const RoutingParams& params);

}  // namespace vanetsim
