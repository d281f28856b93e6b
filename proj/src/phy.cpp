#include "vanetsim/phy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vanetsim {

namespace {
constexpr double kSpeedOfLight = 299'792'458.0;
}

double RadioParams::wavelength() const { return kSpeedOfLight / frequency_hz; }

double RadioParams::crossover_distance() const {
  return 4.0 * std::numbers::pi * antenna_height_m * antenna_height_m / wavelength();
}

SimTime airtime(std::uint64_t frame_bits, const RadioParams& params) {
  if (frame_bits == 0) throw ContractViolation("airtime: frame_bits must be positive");
  const auto rate = static_cast<std::uint64_t>(params.bitrate_bps);
  const std::uint64_t us = (frame_bits * 1'000'000ULL + rate - 1) / rate;
  return params.phy_overhead + SimTime::micros(static_cast<std::int64_t>(us));
}

double received_power_dbm(double d, const RadioParams& p) {
  if (!(d > 0.0)) throw ContractViolation("received_power: distance must be positive");
  const double gains_db = 10.0 * std::log10(p.antenna_gain_tx * p.antenna_gain_rx);
  if (d < p.crossover_distance()) {
    return p.tx_power_dbm + gains_db + 20.0 * std::log10(p.wavelength() / (4.0 * std::numbers::pi * d));
  }
  return p.tx_power_dbm + gains_db + 20.0 * std::log10(p.antenna_height_m * p.antenna_height_m) -
         40.0 * std::log10(d);
}

bool in_range(double d, const RadioParams& p) {
  if (d > p.max_range_m) return false;
  return received_power_dbm(std::max(d, 1e-3), p) >= p.rx_threshold_dbm;
}

Channel::Channel(Scheduler& sched, RadioParams params, std::size_t num_nodes, PositionFn position)
    : sched_(sched), params_(params), position_(std::move(position)), radios_(num_nodes) {}

void Channel::attach(NodeId node, RadioListener* listener) { radios_.at(node).listener = listener; }

RadioMode Channel::mode(NodeId node) const {
  const auto& r = radios_.at(node);
  if (r.transmitting) return RadioMode::Tx;
  if (!r.rx.empty()) return RadioMode::Rx;
  return RadioMode::Idle;
}

void Channel::refresh_mode(NodeId node) {
  auto& r = radios_[node];
  const RadioMode m = mode(node);
  if (m != r.last_mode) {
    r.last_mode = m;
    if (r.listener) r.listener->on_radio_mode(m);
    if (mode_observer_) mode_observer_(node, m);
  }
}

SimTime Channel::transmit(NodeId sender, MacFrame frame) {
  auto& tx_radio = radios_.at(sender);
  if (tx_radio.transmitting) throw ContractViolation("transmit: node already transmitting");
  if (!tx_radio.enabled) throw ContractViolation("transmit: radio disabled");

  const SimTime now = sched_.now();
  ActiveTx active;
  active.tx.id = next_tx_id_++;
  active.tx.sender = sender;
  active.tx.start = now;
  active.tx.end = now + airtime(frame.bits(), params_);
  active.tx.power_dbm = params_.tx_power_dbm;
  active.tx.frame = std::move(frame);

  tx_radio.transmitting = true;
  ++tx_radio.stats.transmissions;
  for (auto& rx : tx_radio.rx) rx.errored = true;  // half duplex
  refresh_mode(sender);

  const Vec2 origin = position_(sender);
  for (NodeId j = 0; j < radios_.size(); ++j) {
    if (j == sender) continue;
    auto& r = radios_[j];
    if (!r.enabled) continue;
    if (!in_range(distance(origin, position_(j)), params_)) continue;
    const bool collided = r.transmitting || !r.rx.empty();
    if (collided) {
      for (auto& other : r.rx) other.errored = true;
    }
    r.rx.push_back({active.tx.id, collided});
    ++r.stats.reception_starts;
    active.receivers.push_back(j);
    if (++r.busy == 1 && r.listener) r.listener->on_carrier_busy();
    refresh_mode(j);
  }

  const std::uint64_t id = active.tx.id;
  const SimTime end = active.tx.end;
  if (trace_) trace_(active.tx, active.receivers);
  active_.emplace(id, std::move(active));
  sched_.schedule(end, sender, EventKind::FrameArrival, [this, id] { finish(id); });
  return end;
}

void Channel::finish(std::uint64_t tx_id) {
  auto it = active_.find(tx_id);
  ActiveTx done = std::move(it->second);
  active_.erase(it);

  auto& sender = radios_[done.tx.sender];
  sender.transmitting = false;
  refresh_mode(done.tx.sender);
  if (sender.listener) sender.listener->on_transmit_end();

  for (NodeId j : done.receivers) {
    auto& r = radios_[j];
    auto rx_it = std::find_if(r.rx.begin(), r.rx.end(),
                              [tx_id](const Reception& rx) { return rx.tx_id == tx_id; });
    const bool errored = rx_it->errored || !r.enabled;
    r.rx.erase(rx_it);
    ++r.stats.reception_ends;
    --r.busy;
    refresh_mode(j);
    if (r.listener) r.listener->on_reception_end(done.tx.frame, errored);
    if (r.busy == 0 && r.listener) r.listener->on_carrier_idle();
  }
}

bool Channel::carrier_busy(NodeId node, SimTime t) const {
  for (const auto& [id, active] : active_) {
    if (active.tx.sender == node) continue;
    if (t < active.tx.start || t >= active.tx.end) continue;
    if (std::find(active.receivers.begin(), active.receivers.end(), node) != active.receivers.end()) {
      return true;
    }
  }
  return false;
}

void Channel::set_enabled(NodeId node, bool enabled) {
  auto& r = radios_.at(node);
  if (!enabled) {
    for (auto& rx : r.rx) rx.errored = true;
  }
  r.enabled = enabled;
}

}  // namespace vanetsim
