#pragma once

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>

#include "vanetsim/engine.hpp"
#include "vanetsim/packet.hpp"
#include "vanetsim/phy.hpp"

namespace vanetsim {

struct MacTimings {
  SimTime slot = SimTime::micros(20);
  SimTime sifs = SimTime::micros(10);
  SimTime difs = SimTime::micros(50);
  int cw_min = 31;
  int cw_max = 1023;
  std::uint32_t rts_threshold_bytes = 256;
  int retry_limit = 7;
  std::size_t queue_limit = 50;
  std::uint32_t data_header_bytes = 34;
  std::uint32_t rts_bytes = 20;
  std::uint32_t cts_bytes = 14;
  std::uint32_t ack_bytes = 14;
};

/// Next contention window after a failed attempt: 2(cw+1)-1, capped.
int next_contention_window(int cw, const MacTimings& t);

enum class DcfPhase : std::uint8_t { Idle, WaitDifs, Backoff, Tx, WaitCts, WaitAck, DeferNav };
std::string_view to_string(DcfPhase p);

struct MacCounters {
  std::uint64_t mac_packets_from_network = 0;
  std::uint64_t queue_drops = 0;
  std::uint64_t dcf_broadcasts_sent = 0;
  std::uint64_t dcf_broadcasts_received = 0;
  std::uint64_t signals_received_without_errors = 0;
  std::uint64_t signals_received_with_errors = 0;
  std::uint64_t mac_unicast_drops = 0;
  std::uint64_t unicast_attempts = 0;
  std::uint64_t unicast_success = 0;
  std::uint64_t rts_sent = 0;
  std::uint64_t cts_sent = 0;
  std::uint64_t ack_sent = 0;
  std::uint64_t data_unicast_sent = 0;
  std::uint64_t duplicates_suppressed = 0;
};

/// What the MAC reports upward to the node's network layer.
class MacUpper {
 public:
  virtual ~MacUpper() = default;
  virtual void mac_deliver(std::shared_ptr<const NetPacket> packet, NodeId from) = 0;
  /// Retry limit exhausted towards `next_hop`.
  virtual void mac_unicast_failed(std::shared_ptr<const NetPacket> packet, NodeId next_hop) = 0;
};

/// 802.11 Distributed Coordination Function for one station: DIFS/slot
/// contention with binary-exponential backoff that freezes while the medium
/// (physical or NAV) is busy, RTS/CTS above the threshold, ACKed unicast
/// with a bounded retry count, and unacknowledged broadcast.
class Dcf : public RadioListener {
 public:
  using AttemptHook = std::function<void(const MacFrame& frame, int cw, int retry)>;

  Dcf(NodeId self, Scheduler& sched, Channel& channel, MacTimings timings, RngStream backoff_rng,
      MacUpper* upper);

  /// Hands a packet from the network layer to the MAC. next_hop may be
  /// kBroadcast. Returns false if the queue was full and the packet dropped.
  bool enqueue(std::shared_ptr<const NetPacket> packet, NodeId next_hop);

  /// Stops the station for good (radio disabled or battery exhausted).
  void shutdown();

  DcfPhase phase() const;
  int cw() const { return cw_; }
  int retry_count() const { return retry_; }
  int backoff_slots() const { return backoff_slots_; }
  SimTime nav_until() const { return nav_until_; }
  std::size_t held() const { return queue_.size() + (current_ ? 1 : 0); }
  const MacCounters& counters() const { return counters_; }
  const MacTimings& timings() const { return t_; }

  /// NAV reservation carried by an RTS for a DATA frame of `payload_bytes`.
  SimTime rts_duration(std::uint32_t payload_bytes) const;

  void set_attempt_hook(AttemptHook hook) { attempt_hook_ = std::move(hook); }
  /// Test hook: the next backoff draw returns exactly `slots`.
  void force_next_backoff(int slots) { forced_backoff_ = slots; }

  // RadioListener
  void on_carrier_busy() override { medium_changed(); }
  void on_carrier_idle() override { medium_changed(); }
  void on_reception_end(const MacFrame& frame, bool errored) override;
  void on_transmit_end() override;

 private:
  enum class Exchange : std::uint8_t { None, Contending, TxBroadcast, TxRts, WaitCts, SifsData, TxData, WaitAck };

  struct Pending {
    std::shared_ptr<const NetPacket> packet;
    NodeId next_hop;
    std::uint16_t mac_seq;
  };

  bool medium_idle_now() const;
  void medium_changed();
  void on_busy();
  void on_idle();
  int remaining_slots(SimTime t) const;
  int draw_backoff();
  void begin_backoff(int slots);
  void next_frame();
  void start_contention();
  void schedule_access();
  void access_granted();
  void on_timeout();
  void finish_current();
  void extend_nav(SimTime until);
  void send_response(MacFrame frame);
  SimTime frame_air(std::uint32_t bytes) const;
  MacFrame make_data(const Pending& p) const;

  NodeId self_;
  Scheduler& sched_;
  Channel& channel_;
  MacTimings t_;
  RngStream rng_;
  MacUpper* upper_;

  std::deque<Pending> queue_;
  std::optional<Pending> current_;
  Exchange exchange_ = Exchange::None;
  int retry_ = 0;
  int cw_;
  int backoff_slots_ = 0;
  bool medium_idle_ = true;
  bool had_busy_ = false;
  bool dead_ = false;
  SimTime idle_ref_{};
  SimTime nav_until_{};
  Ticket access_timer_ = kNoTicket;
  SimTime access_at_{};
  Ticket timeout_timer_ = kNoTicket;
  Ticket nav_timer_ = kNoTicket;
  std::uint16_t next_mac_seq_ = 0;
  std::map<NodeId, std::uint16_t> last_rx_seq_;
  std::optional<int> forced_backoff_;
  MacCounters counters_;
  AttemptHook attempt_hook_;
};

}  // namespace vanetsim
