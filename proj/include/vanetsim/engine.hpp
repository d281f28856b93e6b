#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace vanetsim {

/// Raised when a caller breaks an operation's precondition (scheduling into
/// the past, zero-distance path loss, ...). The CLI maps it to exit code 2.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Simulation time as an integer count of microseconds.
class SimTime {
 public:
  constexpr SimTime() = default;

  static constexpr SimTime micros(std::int64_t us) { return SimTime{us}; }
  static constexpr SimTime millis(std::int64_t ms) { return SimTime{ms * 1000}; }
  static constexpr SimTime seconds(std::int64_t s) { return SimTime{s * 1'000'000}; }
  /// Rounds to the nearest microsecond.
  static SimTime from_seconds(double s);
  static constexpr SimTime max() { return SimTime{std::numeric_limits<std::int64_t>::max()}; }

  constexpr std::int64_t us() const { return us_; }
  constexpr double to_seconds() const { return static_cast<double>(us_) / 1e6; }

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime operator+(SimTime o) const { return SimTime{us_ + o.us_}; }
  constexpr SimTime operator-(SimTime o) const { return SimTime{us_ - o.us_}; }
  constexpr SimTime operator*(std::int64_t k) const { return SimTime{us_ * k}; }
  constexpr SimTime& operator+=(SimTime o) {
    us_ += o.us_;
    return *this;
  }

  std::string str() const;

 private:
  constexpr explicit SimTime(std::int64_t us) : us_(us) {}
  std::int64_t us_ = 0;
};

using NodeId = std::uint32_t;
inline constexpr NodeId kWorld = std::numeric_limits<NodeId>::max();
inline constexpr NodeId kBroadcast = std::numeric_limits<NodeId>::max() - 1;

enum class EventKind : std::uint8_t {
  FrameArrival,
  TimerExpiry,
  MobilityUpdate,
  AppSend,
  SimEnd,
};

std::string_view to_string(EventKind k);

using Ticket = std::uint64_t;
inline constexpr Ticket kNoTicket = 0;

struct Event {
  SimTime fire_at;
  std::uint64_t seq = 0;
  NodeId target = kWorld;
  EventKind kind = EventKind::TimerExpiry;
  std::function<void()> action;
};

/// Priority event queue and clock. Events fire in (fire_at, seq) order, so
/// events scheduled for the same instant run in insertion order.
class Scheduler {
 public:
  using TraceHook = std::function<void(const Event&)>;

  SimTime now() const { return now_; }

  Ticket schedule(SimTime at, NodeId target, EventKind kind, std::function<void()> action);
  Ticket schedule_in(SimTime delay, NodeId target, EventKind kind, std::function<void()> action) {
    return schedule(now_ + delay, target, kind, std::move(action));
  }

  /// No-op for tickets that already fired or were never issued.
  void cancel(Ticket t);
  bool pending(Ticket t) const { return live_.contains(t); }

  /// Dispatches every event with fire_at <= end. Returns the number dispatched.
  /// The clock is left at `end` (or at the last event, if later events remain).
  std::uint64_t run_until(SimTime end);

  std::size_t queued() const { return live_.size(); }
  std::uint64_t dispatched() const { return dispatched_; }

  /// Called for every dispatched event before its action runs.
  void set_trace(TraceHook hook) { trace_ = std::move(hook); }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.seq > b.seq;
    }
  };

  SimTime now_{};
  std::uint64_t next_seq_ = 1;
  std::uint64_t dispatched_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::unordered_set<Ticket> live_;
  TraceHook trace_;
};

/// Named random substreams. Each concern draws from its own generator so that
/// extra draws in one concern never shift the sequence seen by another.
enum class RngConcern : std::uint8_t { Mobility, Backoff, Traffic, Topology, Protocol };

std::string_view to_string(RngConcern c);

class RngStream {
 public:
  RngStream() : RngStream(0) {}
  explicit RngStream(std::uint64_t seed);

  /// Independent stream for `concern`, optionally further split by `index`
  /// (a node id, for per-node streams).
  RngStream substream(RngConcern concern, std::uint64_t index = 0) const;

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform01();
  double uniform(double lo, double hi);
  /// Uniform integer in [lo, hi], unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

 private:
  // xoshiro256** state; output is fully specified, unlike <random>
  // distributions, so sequences match across standard libraries.
  std::uint64_t seed_;
  std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace vanetsim
