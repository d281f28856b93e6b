#include "vanetsim/engine.hpp"

#include <cmath>
#include <cstdio>

namespace vanetsim {

SimTime SimTime::from_seconds(double s) {
  return SimTime{static_cast<std::int64_t>(std::llround(s * 1e6))};
}

std::string SimTime::str() const {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%lld.%06llds", static_cast<long long>(us_ / 1'000'000),
                static_cast<long long>(us_ % 1'000'000));
  return buf;
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::FrameArrival: return "frame-arrival";
    case EventKind::TimerExpiry: return "timer-expiry";
    case EventKind::MobilityUpdate: return "mobility-update";
    case EventKind::AppSend: return "app-send";
    case EventKind::SimEnd: return "sim-end";
  }
  return "?";
}

Ticket Scheduler::schedule(SimTime at, NodeId target, EventKind kind, std::function<void()> action) {
  if (at < now_) {
    throw ContractViolation("schedule into the past: fire_at=" + at.str() + " now=" + now_.str() +
                            " kind=" + std::string(to_string(kind)));
  }
  const Ticket ticket = next_seq_++;
  queue_.push(Event{at, ticket, target, kind, std::move(action)});
  live_.insert(ticket);
  return ticket;
}

void Scheduler::cancel(Ticket t) { live_.erase(t); }

std::uint64_t Scheduler::run_until(SimTime end) {
  std::uint64_t count = 0;
  while (!queue_.empty() && queue_.top().fire_at <= end) {
    // priority_queue only exposes a const top; the element is popped right
    // after, so moving the callback out is safe.
    Event ev = std::move(const_cast<Event&>(queue_.top()));
    queue_.pop();
    if (live_.erase(ev.seq) == 0) continue;  // cancelled
    now_ = ev.fire_at;
    ++count;
    ++dispatched_;
    if (trace_) trace_(ev);
    ev.action();
  }
  if (end > now_) now_ = end;
  return count;
}

std::string_view to_string(RngConcern c) {
  switch (c) {
    case RngConcern::Mobility: return "mobility";
    case RngConcern::Backoff: return "backoff";
    case RngConcern::Traffic: return "traffic";
    case RngConcern::Topology: return "topology";
    case RngConcern::Protocol: return "protocol";
  }
  return "?";
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed) {
  std::uint64_t st = seed;
  for (auto& w : s_) w = splitmix64(st);
}

RngStream RngStream::substream(RngConcern concern, std::uint64_t index) const {
  std::uint64_t st = seed_ ^ (0xa0761d6478bd642fULL * (static_cast<std::uint64_t>(concern) + 1));
  std::uint64_t derived = splitmix64(st);
  st = derived ^ (0xe7037ed1a0b428dbULL * (index + 1));
  derived = splitmix64(st);
  return RngStream{derived};
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw ContractViolation("uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next_u64());
  // Lemire-style rejection to stay unbiased.
  const std::uint64_t limit = (0 - span) % span;
  for (;;) {
    const std::uint64_t x = next_u64();
    const unsigned __int128 m = static_cast<unsigned __int128>(x) * span;
    if (static_cast<std::uint64_t>(m) >= limit) {
      return lo + static_cast<std::int64_t>(m >> 64);
    }
  }
}

}  // namespace vanetsim
