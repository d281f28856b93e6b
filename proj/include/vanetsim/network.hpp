#pragma once

#include <memory>
#include <vector>

#include "vanetsim/engine.hpp"
#include "vanetsim/mac_dcf.hpp"
#include "vanetsim/metrics.hpp"
#include "vanetsim/mobility.hpp"
#include "vanetsim/phy.hpp"
#include "vanetsim/routing.hpp"
#include "vanetsim/scenario.hpp"
#include "vanetsim/traffic_energy.hpp"

namespace vanetsim {

class Network;

/// One station: routing agent over a DCF MAC, with its energy meter.
class Node final : public NodeServices, public MacUpper {
 public:
  Node(Network& net, NodeId id, const ScenarioConfig& cfg);

  // NodeServices
  NodeId self() const override { return id_; }
  SimTime now() const override;
  void send(NetPacket packet, NodeId next_hop) override;
  void deliver(const NetPacket& packet) override;
  Ticket set_timer(SimTime delay, std::function<void()> fn) override;
  void cancel_timer(Ticket t) override;
  RngStream& rng() override { return protocol_rng_; }
  RoutingCounters& counters() override { return counters_; }
  std::uint64_t new_uid() override;

  // MacUpper
  void mac_deliver(std::shared_ptr<const NetPacket> packet, NodeId from) override;
  void mac_unicast_failed(std::shared_ptr<const NetPacket> packet, NodeId next_hop) override;

  RoutingAgent& agent() { return *agent_; }
  const RoutingAgent& agent() const { return *agent_; }
  Dcf& mac() { return *mac_; }
  const Dcf& mac() const { return *mac_; }
  EnergyMeter& energy() { return energy_; }
  const EnergyMeter& energy() const { return energy_; }
  const RoutingCounters& routing_counters() const { return counters_; }
  bool dead() const { return dead_; }

  /// Disables the radio and MAC once the battery is empty.
  void check_battery();
  /// Takes the node off the air for good: timers, MAC and radio stop.
  void power_off();

 private:
  Network& net_;
  NodeId id_;
  RngStream protocol_rng_;
  RoutingCounters counters_;
  EnergyMeter energy_;
  std::unique_ptr<Dcf> mac_;
  std::unique_ptr<RoutingAgent> agent_;
  bool dead_ = false;
};

/// A complete simulation: mobility, shared channel, nodes and CBR sessions
/// built from a validated scenario.
class Network {
 public:
  explicit Network(const ScenarioConfig& cfg);
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  /// Runs to the configured end and returns the ledger.
  MetricsLedger run();
  /// Advances to `t` (no later than the configured end).
  void run_until(SimTime t);
  /// Ledger for the state reached so far.
  MetricsLedger ledger() const;

  /// Hands an application packet to `src` now, outside any session.
  void inject(NodeId src, NodeId dst, std::uint32_t payload_bytes);

  Scheduler& scheduler() { return sched_; }
  Channel& channel() { return channel_; }
  const Channel& channel() const { return channel_; }
  MobilityModel& mobility() { return mobility_; }
  Node& node(NodeId id) { return *nodes_.at(id); }
  const Node& node(NodeId id) const { return *nodes_.at(id); }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<CbrSession>& sessions() const { return sessions_; }
  const std::vector<SessionStats>& session_stats() const { return stats_; }
  const ScenarioConfig& config() const { return cfg_; }
  SimTime end() const { return end_; }
  RngStream& root_rng() { return root_; }

  std::uint64_t next_uid() { return ++uid_; }
  void on_deliver(const NetPacket& packet);
  /// Injected packets delivered (session == kNoSession).
  std::uint64_t injected_delivered() const { return injected_delivered_; }

  static constexpr std::uint32_t kNoSession = 0xffffffffu;

 private:
  void schedule_session(std::size_t index, SimTime at);
  void mobility_tick();
  void settle_energy();

  ScenarioConfig cfg_;
  SimTime end_;
  RngStream root_;
  Scheduler sched_;
  MobilityModel mobility_;
  Channel channel_;
  std::vector<std::unique_ptr<Node>> nodes_;
  std::vector<CbrSession> sessions_;
  std::vector<SessionStats> stats_;
  std::vector<std::uint64_t> next_app_seq_;
  std::uint64_t uid_ = 0;
  std::uint64_t injected_delivered_ = 0;
  bool started_ = false;
};

/// Builds the mobility node specs a scenario describes.
std::vector<MobilityModel::NodeSpec> mobility_specs(const ScenarioConfig& cfg, RngStream& topology_rng);

/// Resolves explicit or drawn sessions.
std::vector<CbrSession> resolve_sessions(const ScenarioConfig& cfg, RngStream& topology_rng);

}  // namespace vanetsim
