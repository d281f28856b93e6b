#include "vanetsim/mobility.hpp"

#include <algorithm>
#include <cmath>

namespace vanetsim {

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

SimTime WaypointState::arrival() const {
  if (speed <= 0.0) return leg_start;
  return leg_start + SimTime::from_seconds(distance(origin, destination) / speed);
}

Vec2 uniform_point(const Terrain& terrain, RngStream& rng) {
  const double x = rng.uniform(0.0, terrain.width);
  const double y = rng.uniform(0.0, terrain.height);
  return {x, y};
}

WaypointState next_leg(const WaypointState& state, const Terrain& terrain,
                       const WaypointParams& params, SimTime depart, RngStream& rng) {
  WaypointState next;
  next.origin = state.destination;
  next.destination = uniform_point(terrain, rng);
  next.speed = params.speed_max > params.speed_min ? rng.uniform(params.speed_min, params.speed_max)
                                                   : params.speed_min;
  next.leg_start = depart;
  next.pause_until = next.arrival() + params.pause;
  return next;
}

Vec2 position_at(const WaypointState& state, SimTime t) {
  const SimTime arrive = state.arrival();
  if (t <= state.leg_start) return state.origin;
  if (t >= arrive) return state.destination;
  const double frac = static_cast<double>((t - state.leg_start).us()) /
                      static_cast<double>((arrive - state.leg_start).us());
  return {state.origin.x + (state.destination.x - state.origin.x) * frac,
          state.origin.y + (state.destination.y - state.origin.y) * frac};
}

MobilityModel::MobilityModel(Terrain terrain, WaypointParams params, std::vector<NodeSpec> nodes,
                             RngStream rng)
    : terrain_(terrain), params_(params), specs_(std::move(nodes)), rng_(rng) {
  states_.resize(specs_.size());
  script_index_.assign(specs_.size(), 0);
  samples_.resize(specs_.size());
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const auto& spec = specs_[i];
    WaypointState at_rest;
    at_rest.origin = at_rest.destination = spec.initial;
    switch (spec.kind) {
      case Kind::Static:
        states_[i] = at_rest;
        states_[i].pause_until = SimTime::max();
        break;
      case Kind::RandomWaypoint:
        states_[i] = next_leg(at_rest, terrain_, params_, SimTime{}, rng_);
        leg_speeds_.push_back(states_[i].speed);
        break;
      case Kind::Scripted:
        states_[i] = at_rest;
        states_[i] = scripted_leg(static_cast<NodeId>(i), SimTime{});
        break;
    }
    samples_[i] = position_at(states_[i], SimTime{});
  }
}

WaypointState MobilityModel::scripted_leg(NodeId node, SimTime depart) {
  const auto& script = specs_[node].script;
  WaypointState next;
  next.origin = states_[node].destination;
  if (script.empty()) {
    next.destination = next.origin;
    next.leg_start = depart;
    next.pause_until = SimTime::max();
    return next;
  }
  next.destination = script[script_index_[node] % script.size()];
  ++script_index_[node];
  next.speed = params_.speed_max > params_.speed_min
                   ? rng_.uniform(params_.speed_min, params_.speed_max)
                   : params_.speed_min;
  leg_speeds_.push_back(next.speed);
  next.leg_start = depart;
  next.pause_until = next.arrival() + params_.pause;
  return next;
}

void MobilityModel::advance(SimTime t) {
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    if (specs_[i].kind == Kind::Static) continue;
    // Zero-length legs (destination == origin) would otherwise spin; the
    // departure time strictly advances only if pause > 0 or distance > 0.
    int guard = 0;
    while (states_[i].departure() <= t && states_[i].departure() != SimTime::max() && guard++ < 64) {
      const SimTime depart = states_[i].departure();
      if (specs_[i].kind == Kind::RandomWaypoint) {
        states_[i] = next_leg(states_[i], terrain_, params_, depart, rng_);
        leg_speeds_.push_back(states_[i].speed);
      } else {
        states_[i] = scripted_leg(static_cast<NodeId>(i), depart);
      }
    }
    samples_[i] = position_at(states_[i], t);
  }
}

}  // namespace vanetsim
