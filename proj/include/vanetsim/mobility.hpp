#pragma once

#include <vector>

#include "vanetsim/engine.hpp"

namespace vanetsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

double distance(Vec2 a, Vec2 b);

struct Terrain {
  double width = 1500.0;
  double height = 1500.0;

  bool contains(Vec2 p) const { return p.x >= 0 && p.x <= width && p.y >= 0 && p.y <= height; }
};

struct WaypointParams {
  double speed_min = 3.0;
  double speed_max = 20.0;
  SimTime pause = SimTime{};
};

/// One straight leg of random-waypoint motion. The node is at `origin` at
/// `leg_start`, travels at constant `speed` and reaches `destination` at
/// arrival(); it then waits until `pause_until` before the next leg.
struct WaypointState {
  Vec2 origin;
  Vec2 destination;
  double speed = 0.0;
  SimTime leg_start;
  SimTime pause_until;

  SimTime arrival() const;
  SimTime departure() const { return pause_until; }
};

Vec2 uniform_point(const Terrain& terrain, RngStream& rng);

/// Starts a new leg from the current destination at time `depart`: new
/// destination uniform over the terrain, speed uniform in [min, max].
WaypointState next_leg(const WaypointState& state, const Terrain& terrain,
                       const WaypointParams& params, SimTime depart, RngStream& rng);

/// Linear interpolation along the leg; clamps to the endpoints outside it.
Vec2 position_at(const WaypointState& state, SimTime t);

/// Per-node kinematics sampled at a fixed tick. Nodes are either static,
/// random-waypoint, or follow a scripted waypoint loop.
class MobilityModel {
 public:
  enum class Kind { Static, RandomWaypoint, Scripted };

  struct NodeSpec {
    Kind kind = Kind::RandomWaypoint;
    Vec2 initial;
    std::vector<Vec2> script;  // Scripted only
  };

  MobilityModel(Terrain terrain, WaypointParams params, std::vector<NodeSpec> nodes, RngStream rng);

  /// Advances every node's kinematics to time t and refreshes the sample.
  void advance(SimTime t);

  /// Most recent sample for `node`.
  Vec2 position(NodeId node) const { return samples_.at(node); }
  const std::vector<Vec2>& positions() const { return samples_; }
  const WaypointState& state(NodeId node) const { return states_.at(node); }
  std::size_t size() const { return samples_.size(); }

  /// Every completed or current leg speed, for invariant checks.
  const std::vector<double>& leg_speeds() const { return leg_speeds_; }

 private:
  WaypointState scripted_leg(NodeId node, SimTime depart);

  Terrain terrain_;
  WaypointParams params_;
  std::vector<NodeSpec> specs_;
  std::vector<WaypointState> states_;
  std::vector<std::size_t> script_index_;
  std::vector<Vec2> samples_;
  std::vector<double> leg_speeds_;
  RngStream rng_;
};

}  // namespace vanetsim
