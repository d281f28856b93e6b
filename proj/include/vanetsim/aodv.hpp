#pragma once

#include <optional>
#include <vector>

#include "vanetsim/reactive.hpp"

namespace vanetsim {

struct AodvRreq {
  std::uint32_t rreq_id = 0;
  NodeId orig = 0;
  std::uint32_t orig_seq = 0;
  NodeId dest = 0;
  std::optional<std::uint32_t> dest_seq;  // unknown when nullopt
  std::uint32_t hop_count = 0;
  int ttl = 0;
};

struct AodvRrep {
  NodeId orig = 0;
  NodeId dest = 0;
  std::uint32_t dest_seq = 0;
  std::uint32_t hop_count = 0;
};

using AodvRerr = RouteError;

/// On-demand distance vector routing. Link breaks are learned only from MAC
/// retry exhaustion; error notification is a one-hop broadcast filtered by
/// each receiver against its own next hops.
class AodvAgent : public ReactiveAgent {
 public:
  AodvAgent(NodeServices& node, const RoutingParams& params);

  Protocol protocol() const override { return Protocol::Aodv; }

  std::uint32_t own_seq() const { return own_seq_; }

 protected:
  void handle_control(const NetPacket& packet, NodeId prev_hop) override;
  void send_discovery(NodeId dest, int attempt) override;
  MessageType error_type() const override { return MessageType::AodvRerr; }

 private:
  void process_rreq(const AodvRreq& msg, NodeId prev_hop);
  void process_rrep(const AodvRrep& msg, NodeId prev_hop);
  void send_rrep(const AodvRrep& msg);

  std::uint32_t own_seq_ = 0;
  std::uint32_t next_rreq_id_ = 0;
  DuplicateCache rreq_seen_;
};

}  // namespace vanetsim
