#pragma once

#include <functional>
#include <map>
#include <vector>

#include "vanetsim/engine.hpp"
#include "vanetsim/mobility.hpp"
#include "vanetsim/packet.hpp"

namespace vanetsim {

struct RadioParams {
  double frequency_hz = 2.4e9;
  double bitrate_bps = 2'000'000;
  double tx_power_dbm = 15.0;
  double antenna_gain_tx = 1.0;
  double antenna_gain_rx = 1.0;
  double antenna_height_m = 1.5;
  double rx_threshold_dbm = -81.0;
  double max_range_m = 100.0;
  SimTime phy_overhead = SimTime::micros(192);

  double wavelength() const;
  /// Free-space / two-ray crossover distance 4*pi*ht*hr/lambda.
  double crossover_distance() const;
};

/// phy_overhead + bits/bitrate, rounded up to whole microseconds.
SimTime airtime(std::uint64_t frame_bits, const RadioParams& params);

/// Free-space loss below the crossover distance, two-ray ground at or beyond.
double received_power_dbm(double distance_m, const RadioParams& params);

/// True if a receiver at `distance_m` decodes the sender at all: inside the
/// hard maximum range and above the receive threshold.
bool in_range(double distance_m, const RadioParams& params);

struct Transmission {
  std::uint64_t id = 0;
  NodeId sender = 0;
  MacFrame frame;
  SimTime start;
  SimTime end;
  double power_dbm = 0.0;
};

enum class RadioMode : std::uint8_t { Idle, Rx, Tx };

/// Callbacks from the shared medium into one node's MAC.
class RadioListener {
 public:
  virtual ~RadioListener() = default;
  virtual void on_carrier_busy() = 0;
  virtual void on_carrier_idle() = 0;
  virtual void on_reception_end(const MacFrame& frame, bool errored) = 0;
  virtual void on_transmit_end() = 0;
  virtual void on_radio_mode(RadioMode) {}
};

struct PhyStats {
  std::uint64_t reception_starts = 0;
  std::uint64_t reception_ends = 0;
  std::uint64_t transmissions = 0;
};

/// The shared air interface. Reception sets are fixed at transmission start
/// from the latest mobility sample; propagation delay is below one
/// microsecond at these ranges and is treated as zero. Any temporal overlap
/// of two receptions at a node errors both (no capture), and a transmitting
/// node receives nothing.
class Channel {
 public:
  using PositionFn = std::function<Vec2(NodeId)>;
  using AirTrace = std::function<void(const Transmission&, const std::vector<NodeId>& receivers)>;

  Channel(Scheduler& sched, RadioParams params, std::size_t num_nodes, PositionFn position);

  void attach(NodeId node, RadioListener* listener);

  /// Puts `frame` on the air now. Returns the transmission end time.
  SimTime transmit(NodeId sender, MacFrame frame);

  /// Physical carrier sense only: any in-range transmission from another
  /// node overlapping t. Valid for t no earlier than the oldest active
  /// transmission.
  bool carrier_busy(NodeId node, SimTime t) const;
  bool carrier_busy(NodeId node) const { return radios_.at(node).busy > 0; }

  bool transmitting(NodeId node) const { return radios_.at(node).transmitting; }
  RadioMode mode(NodeId node) const;

  /// A disabled radio neither senses, receives nor transmits.
  void set_enabled(NodeId node, bool enabled);
  bool enabled(NodeId node) const { return radios_.at(node).enabled; }

  const RadioParams& params() const { return params_; }
  const PhyStats& stats(NodeId node) const { return radios_.at(node).stats; }

  void set_air_trace(AirTrace trace) { trace_ = std::move(trace); }
  /// Notified on every radio mode change of any node (energy accounting).
  void set_mode_observer(std::function<void(NodeId, RadioMode)> fn) { mode_observer_ = std::move(fn); }

 private:
  struct Reception {
    std::uint64_t tx_id;
    bool errored;
  };
  struct NodeRadio {
    RadioListener* listener = nullptr;
    bool enabled = true;
    bool transmitting = false;
    int busy = 0;
    std::vector<Reception> rx;
    PhyStats stats;
    RadioMode last_mode = RadioMode::Idle;
  };
  struct ActiveTx {
    Transmission tx;
    std::vector<NodeId> receivers;
  };

  void finish(std::uint64_t tx_id);
  void refresh_mode(NodeId node);

  Scheduler& sched_;
  RadioParams params_;
  PositionFn position_;
  std::vector<NodeRadio> radios_;
  std::map<std::uint64_t, ActiveTx> active_;
  std::uint64_t next_tx_id_ = 1;
  AirTrace trace_;
  std::function<void(NodeId, RadioMode)> mode_observer_;
};

}  // namespace vanetsim
