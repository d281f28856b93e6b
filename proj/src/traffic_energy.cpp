#include "vanetsim/traffic_energy.hpp"

#include <algorithm>
#include <set>

namespace vanetsim {

std::uint64_t cbr_offered(const CbrSession& s, SimTime end) {
  const SimTime stop = std::min(s.stop, end + SimTime::micros(1));
  if (stop <= s.start || s.interval <= SimTime{}) return 0;
  const std::int64_t span = (stop - s.start).us();
  return static_cast<std::uint64_t>((span + s.interval.us() - 1) / s.interval.us());
}

bool SessionStats::record(std::uint64_t app_seq, SimTime delay) {
  if (received.size() <= app_seq) received.resize(app_seq + 1, false);
  if (received[app_seq]) {
    ++app_duplicates;
    return false;
  }
  received[app_seq] = true;
  ++app_received;
  delay_sum += delay;
  delay_max = std::max(delay_max, delay);
  return true;
}

double SessionStats::mean_delay_s() const {
  return app_received == 0 ? 0.0 : delay_sum.to_seconds() / static_cast<double>(app_received);
}

std::vector<std::pair<NodeId, NodeId>> draw_session_pairs(std::size_t num_nodes, std::size_t count, RngStream& rng) {
  if (num_nodes < 2 && count > 0) throw ContractViolation("sessions need at least two nodes");
  if (count > num_nodes * (num_nodes - 1)) throw ContractViolation("more sessions than distinct node pairs");
  std::vector<std::pair<NodeId, NodeId>> out;
  std::set<std::pair<NodeId, NodeId>> used;
  const auto hi = static_cast<std::int64_t>(num_nodes) - 1;
  while (out.size() < count) {
    const auto src = static_cast<NodeId>(rng.uniform_int(0, hi));
    const auto dst = static_cast<NodeId>(rng.uniform_int(0, hi));
    if (src == dst || !used.insert({src, dst}).second) continue;
    out.emplace_back(src, dst);
  }
  return out;
}

double Battery::current_ma(RadioMode mode) const {
  switch (mode) {
    case RadioMode::Tx: return p_.tx_ma;
    case RadioMode::Rx: return p_.rx_ma;
    case RadioMode::Idle: return p_.idle_ma;
  }
  return p_.idle_ma;
}

void Battery::account(RadioMode mode, SimTime duration) {
  if (duration < SimTime{}) throw ContractViolation("battery: negative duration");
  const double hours = duration.to_seconds() / 3600.0;
  drawn_ = std::min(p_.capacity_mah, drawn_ + current_ma(mode) * hours);
}

void EnergyMeter::settle(SimTime now) {
  if (now < since_) throw ContractViolation("energy: time went backwards");
  const SimTime d = now - since_;
  time_[static_cast<std::size_t>(mode_)] += d;
  battery_.account(mode_, d);
  since_ = now;
}

void EnergyMeter::set_mode(RadioMode mode, SimTime now) {
  settle(now);
  mode_ = mode;
}

SimTime EnergyMeter::total_time() const { return time_[0] + time_[1] + time_[2]; }

}  // namespace vanetsim
