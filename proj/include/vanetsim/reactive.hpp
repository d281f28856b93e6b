#pragma once

#include <map>
#include <vector>

#include "vanetsim/routing.hpp"

namespace vanetsim {

/// Unreachable destinations with the sequence number each was invalidated at.
struct RouteError {
  std::vector<std::pair<NodeId, std::uint32_t>> unreachable;
};

/// Buffer-and-discover machinery shared by the on-demand agents: packets
/// without a route wait in a bounded buffer while a discovery is retried
/// with binary-exponential waits; when the retries run out the buffer for
/// that destination is dropped.
class ReactiveAgent : public RoutingAgent {
 public:
  using RoutingAgent::RoutingAgent;

  bool discovery_in_flight(NodeId dest) const { return discoveries_.contains(dest); }
  std::size_t buffered(NodeId dest) const { return pending_.size(dest); }

  /// Invalidates every route through the neighbor and broadcasts an error.
  void on_link_failure(NodeId neighbor, const NetPacket& packet) override;

 protected:
  /// Source packets are buffered and trigger discovery; transit packets are
  /// dropped and reported upstream.
  void on_route_miss(NetPacket packet) override;

  /// Emits one discovery attempt (1-based) for dest.
  virtual void send_discovery(NodeId dest, int attempt) = 0;

  /// Flushes buffered packets for every in-flight discovery that now has a
  /// route. Call after any change that may have installed routes.
  void resolve_pending();

  virtual MessageType error_type() const = 0;
  /// One-hop broadcast error; empty lists send nothing.
  void broadcast_error(std::vector<std::pair<NodeId, std::uint32_t>> lost, bool originated);
  /// Drops routes that use `prev_hop` toward a listed destination and
  /// re-propagates only those.
  void process_error(const RouteError& msg, NodeId prev_hop);

  PendingBuffer pending_{params_.pending_per_dest, params_.pending_lifetime};

 private:
  struct Discovery {
    int attempts = 0;
    Ticket timer = kNoTicket;
  };

  void attempt(NodeId dest);
  void on_discovery_timeout(NodeId dest);
  void route_found(NodeId dest);

  std::map<NodeId, Discovery> discoveries_;
};

}  // namespace vanetsim
