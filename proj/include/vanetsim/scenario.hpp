#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vanetsim/mac_dcf.hpp"
#include "vanetsim/mobility.hpp"
#include "vanetsim/phy.hpp"
#include "vanetsim/routing.hpp"
#include "vanetsim/traffic_energy.hpp"

namespace vanetsim {

/// Bad scenario input. The CLI maps it to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SessionSpec {
  NodeId src = 0;
  NodeId dst = 0;
  std::optional<double> start_s;  // scenario-wide window when unset
  std::optional<double> stop_s;
};

enum class MobilityKind : std::uint8_t { RandomWaypoint, Static };

struct ScenarioConfig {
  std::string name = "unnamed";
  double width_m = 1500;
  double height_m = 1500;
  double sim_time_s = 3000;
  int num_nodes = 15;

  MobilityKind mobility = MobilityKind::RandomWaypoint;
  double speed_min_mps = 3;
  double speed_max_mps = 20;
  double pause_s = 0;
  double mobility_update_ms = 100;
  std::map<NodeId, Vec2> positions;                   // initial positions
  std::map<NodeId, std::vector<Vec2>> waypoints;      // scripted nodes

  Protocol protocol = Protocol::Aodv;
  int session_count = 5;                 // random pairs when `sessions` is empty
  std::map<int, SessionSpec> sessions;   // explicit, by index
  std::uint32_t payload_bytes = 512;
  double interval_ms = 250;
  double session_start_s = 0;
  std::optional<double> session_stop_s;  // sim_time_s when unset

  std::uint64_t seed = 1;

  RadioParams radio;
  MacTimings mac;
  RoutingParams routing;
  BatteryParams battery;

  double altitude_m = 0;           // recorded only
  double weather_interval_ms = 0;  // recorded only

  SimTime sim_time() const { return SimTime::from_seconds(sim_time_s); }
};

/// Parses `key = value` lines (`#` starts a comment). Unknown keys, bad
/// values and duplicate keys raise ValidationError naming the key. Missing
/// keys keep their defaults. Does not validate cross-field constraints.
ScenarioConfig parse_scenario(const std::string& text);

/// Checks every field and cross-field constraint; throws ValidationError.
void validate(const ScenarioConfig& cfg);

/// parse + validate.
ScenarioConfig load_scenario_text(const std::string& text);
/// Reads a file, or the bundled scenario when `path_or_name` is "table1".
ScenarioConfig load_scenario(const std::string& path_or_name);

/// The bundled default scenario source.
const std::string& bundled_table1();

/// Every key with its resolved value, in the parse format; parsing the
/// result yields an identical config.
std::string resolved_echo(const ScenarioConfig& cfg);

/// Hash of the echo with seed and protocol excluded: runs of different
/// protocols and seeds over the same scenario share it.
std::string scenario_hash(const ScenarioConfig& cfg);

}  // namespace vanetsim
