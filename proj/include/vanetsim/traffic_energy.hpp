#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "vanetsim/engine.hpp"
#include "vanetsim/phy.hpp"

namespace vanetsim {

struct CbrSession {
  std::uint32_t id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  std::uint32_t payload_bytes = 512;
  SimTime interval = SimTime::millis(250);
  SimTime start{};
  SimTime stop = SimTime::seconds(3000);
};

/// Packets a session offers inside [start, min(stop, end)].
std::uint64_t cbr_offered(const CbrSession& s, SimTime end);

struct SessionStats {
  std::uint64_t app_sent = 0;
  std::uint64_t app_received = 0;
  std::uint64_t app_duplicates = 0;
  SimTime delay_sum{};
  SimTime delay_max{};
  std::vector<bool> received;  // by app_seq

  /// Records one arrival; false for a repeat of an already counted app_seq.
  bool record(std::uint64_t app_seq, SimTime delay);
  double mean_delay_s() const;
};

/// Draws `count` distinct ordered (src, dst) pairs, src != dst.
std::vector<std::pair<NodeId, NodeId>> draw_session_pairs(std::size_t num_nodes, std::size_t count, RngStream& rng);

struct BatteryParams {
  double capacity_mah = 1500.0;
  double tx_ma = 280.0;
  double rx_ma = 180.0;
  double idle_ma = 1.0;
  double voltage_v = 3.0;
};

class Battery {
 public:
  explicit Battery(BatteryParams p = {}) : p_(p) {}

  /// Draws current(mode) for `duration`. Saturates at capacity.
  void account(RadioMode mode, SimTime duration);

  double current_ma(RadioMode mode) const;
  double drawn_mah() const { return drawn_; }
  double residual_mah() const { return p_.capacity_mah - drawn_; }
  double energy_joules() const { return drawn_ * 3.6 * p_.voltage_v; }
  bool depleted() const { return drawn_ >= p_.capacity_mah; }
  const BatteryParams& params() const { return p_; }

 private:
  BatteryParams p_;
  double drawn_ = 0.0;
};

/// Integrates radio mode residency into a battery.
class EnergyMeter {
 public:
  explicit EnergyMeter(BatteryParams p = {}) : battery_(p) {}

  /// Closes the interval in the previous mode at `now` and opens `mode`.
  void set_mode(RadioMode mode, SimTime now);
  /// Accounts up to `now` without changing mode.
  void settle(SimTime now);

  const Battery& battery() const { return battery_; }
  RadioMode mode() const { return mode_; }
  SimTime time_in(RadioMode m) const { return time_[static_cast<std::size_t>(m)]; }
  SimTime total_time() const;

 private:
  Battery battery_;
  RadioMode mode_ = RadioMode::Idle;
  SimTime since_{};
  std::array<SimTime, 3> time_{};
};

}  // namespace vanetsim
