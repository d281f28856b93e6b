#pragma once

#include <vector>

#include "vanetsim/reactive.hpp"

namespace vanetsim {

struct PathEntry {
  NodeId node = 0;
  std::uint32_t seq = 0;
  std::uint32_t hops = 0;
};

/// Request or reply carrying every node it has traversed, originator first.
struct DymoMessage {
  bool is_request = true;
  NodeId target = 0;
  NodeId orig = 0;
  std::vector<PathEntry> path;
  int ttl = 0;

  std::uint32_t body_bytes() const { return 8 + 8 * static_cast<std::uint32_t>(path.size()); }
};

using DymoRerr = RouteError;

/// Reactive routing with path accumulation: every hop a request or reply
/// crosses becomes a route at each later receiver. Only the target answers.
class DymoAgent : public ReactiveAgent {
 public:
  DymoAgent(NodeServices& node, const RoutingParams& params);

  Protocol protocol() const override { return Protocol::Dymo; }
  std::uint32_t own_seq() const { return own_seq_; }

 protected:
  void handle_control(const NetPacket& packet, NodeId prev_hop) override;
  void send_discovery(NodeId dest, int attempt) override;
  MessageType error_type() const override { return MessageType::DymoRerr; }

 private:
  void process(const DymoMessage& msg, NodeId prev_hop);
  void install_path(const DymoMessage& msg, NodeId prev_hop);
  void unicast_toward(DymoMessage msg, NodeId toward, bool originated);

  std::uint32_t own_seq_ = 0;
  DuplicateCache rreq_seen_;
};

}  // namespace vanetsim
