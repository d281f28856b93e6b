#include "vanetsim/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <limits>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "table1_scn.hpp"

namespace vanetsim {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail(const std::string& key, const std::string& why) {
  throw ValidationError(key + ": " + why);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(out)) fail(key, "expected a number, got '" + v + "'");
  return out;
}

std::int64_t to_int(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) fail(key, "expected an integer, got '" + v + "'");
  return out;
}

std::string fmt(double d) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, p);
}

std::string fmt_time_s(SimTime t) { return fmt(t.to_seconds()); }
std::string fmt_time_ms(SimTime t) { return fmt(static_cast<double>(t.us()) / 1000.0); }
std::string fmt_time_us(SimTime t) { return std::to_string(t.us()); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

Vec2 to_point(const std::string& key, const std::string& v) {
  const auto parts = split(v, ',');
  if (parts.size() != 2) fail(key, "expected x,y");
  return {to_double(key, parts[0]), to_double(key, parts[1])};
}

std::string fmt_point(Vec2 p) { return fmt(p.x) + "," + fmt(p.y); }

struct Field {
  const char* key;
  std::function<void(ScenarioConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
  bool identity = false;  // excluded from the scenario hash
};

template <typename Get>
Field num(const char* key, Get member) {
  return {key,
          [member](ScenarioConfig& c, const std::string& k, const std::string& v) { member(c) = to_double(k, v); },
          [member](const ScenarioConfig& c) { return fmt(member(const_cast<ScenarioConfig&>(c))); }};
}

template <typename T, typename Get>
Field integer(const char* key, Get member) {
  return {key,
          [member](ScenarioConfig& c, const std::string& k, const std::string& v) {
            const auto x = to_int(k, v);
            if (x < static_cast<std::int64_t>(std::numeric_limits<T>::min()) ||
                static_cast<std::uint64_t>(x) > static_cast<std::uint64_t>(std::numeric_limits<T>::max()))
              fail(k, "out of range");
            member(c) = static_cast<T>(x);
          },
          [member](const ScenarioConfig& c) { return std::to_string(member(const_cast<ScenarioConfig&>(c))); }};
}

enum class Unit { Seconds, Millis, Micros };

template <typename Get>
Field duration(const char* key, Unit unit, Get member) {
  return {key,
          [member, unit](ScenarioConfig& c, const std::string& k, const std::string& v) {
            const double x = to_double(k, v);
            switch (unit) {
              case Unit::Seconds: member(c) = SimTime::from_seconds(x); break;
              case Unit::Millis: member(c) = SimTime::from_seconds(x / 1e3); break;
              case Unit::Micros: member(c) = SimTime::micros(to_int(k, v)); break;
            }
          },
          [member, unit](const ScenarioConfig& c) {
            const SimTime t = member(const_cast<ScenarioConfig&>(c));
            switch (unit) {
              case Unit::Seconds: return fmt_time_s(t);
              case Unit::Millis: return fmt_time_ms(t);
              case Unit::Micros: return fmt_time_us(t);
            }
            return fmt_time_us(t);
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = [] {
    std::vector<Field> v;
    v.push_back({"name", [](ScenarioConfig& c, const std::string&, const std::string& x) { c.name = x; },
                 [](const ScenarioConfig& c) { return c.name; }});
    v.push_back(num("width_m", [](ScenarioConfig& c) -> double& { return c.width_m; }));
    v.push_back(num("height_m", [](ScenarioConfig& c) -> double& { return c.height_m; }));
    v.push_back(num("sim_time_s", [](ScenarioConfig& c) -> double& { return c.sim_time_s; }));
    v.push_back(integer<int>("num_nodes", [](ScenarioConfig& c) -> int& { return c.num_nodes; }));
    v.push_back({"mobility",
                 [](ScenarioConfig& c, const std::string& k, const std::string& x) {
                   if (x == "random_waypoint") c.mobility = MobilityKind::RandomWaypoint;
                   else if (x == "static") c.mobility = MobilityKind::Static;
                   else fail(k, "expected random_waypoint or static");
                 },
                 [](const ScenarioConfig& c) {
                   return std::string(c.mobility == MobilityKind::Static ? "static" : "random_waypoint");
                 }});
    v.push_back(num("speed_min_mps", [](ScenarioConfig& c) -> double& { return c.speed_min_mps; }));
    v.push_back(num("speed_max_mps", [](ScenarioConfig& c) -> double& { return c.speed_max_mps; }));
    v.push_back(num("pause_s", [](ScenarioConfig& c) -> double& { return c.pause_s; }));
    v.push_back(num("mobility_update_ms", [](ScenarioConfig& c) -> double& { return c.mobility_update_ms; }));
    Field proto{"protocol",
                [](ScenarioConfig& c, const std::string& k, const std::string& x) {
                  auto p = parse_protocol(x);
                  if (!p) fail(k, "expected one of aodv, dymo, olsr, zrp");
                  c.protocol = *p;
                },
                [](const ScenarioConfig& c) { return std::string(to_string(c.protocol)); }, true};
    v.push_back(proto);
    v.push_back(integer<int>("sessions", [](ScenarioConfig& c) -> int& { return c.session_count; }));
    v.push_back(integer<std::uint32_t>("payload_bytes", [](ScenarioConfig& c) -> std::uint32_t& { return c.payload_bytes; }));
    v.push_back(num("interval_ms", [](ScenarioConfig& c) -> double& { return c.interval_ms; }));
    v.push_back(num("session_start_s", [](ScenarioConfig& c) -> double& { return c.session_start_s; }));
    v.push_back({"session_stop_s",
                 [](ScenarioConfig& c, const std::string& k, const std::string& x) {
                   if (x == "end") c.session_stop_s.reset();
                   else c.session_stop_s = to_double(k, x);
                 },
                 [](const ScenarioConfig& c) { return c.session_stop_s ? fmt(*c.session_stop_s) : std::string("end"); }});
    Field seed = integer<std::uint64_t>("seed", [](ScenarioConfig& c) -> std::uint64_t& { return c.seed; });
    seed.identity = true;
    v.push_back(seed);
    // radio
    v.push_back(num("tx_power_dbm", [](ScenarioConfig& c) -> double& { return c.radio.tx_power_dbm; }));
    v.push_back(num("max_range_m", [](ScenarioConfig& c) -> double& { return c.radio.max_range_m; }));
    v.push_back(num("bitrate_bps", [](ScenarioConfig& c) -> double& { return c.radio.bitrate_bps; }));
    v.push_back(num("frequency_hz", [](ScenarioConfig& c) -> double& { return c.radio.frequency_hz; }));
    v.push_back(num("antenna_height_m", [](ScenarioConfig& c) -> double& { return c.radio.antenna_height_m; }));
    v.push_back(num("antenna_gain_tx", [](ScenarioConfig& c) -> double& { return c.radio.antenna_gain_tx; }));
    v.push_back(num("antenna_gain_rx", [](ScenarioConfig& c) -> double& { return c.radio.antenna_gain_rx; }));
    v.push_back(num("rx_threshold_dbm", [](ScenarioConfig& c) -> double& { return c.radio.rx_threshold_dbm; }));
    v.push_back(duration("phy_overhead_us", Unit::Micros, [](ScenarioConfig& c) -> SimTime& { return c.radio.phy_overhead; }));
    // mac
    v.push_back(duration("slot_us", Unit::Micros, [](ScenarioConfig& c) -> SimTime& { return c.mac.slot; }));
    v.push_back(duration("sifs_us", Unit::Micros, [](ScenarioConfig& c) -> SimTime& { return c.mac.sifs; }));
    v.push_back(duration("difs_us", Unit::Micros, [](ScenarioConfig& c) -> SimTime& { return c.mac.difs; }));
    v.push_back(integer<int>("cw_min", [](ScenarioConfig& c) -> int& { return c.mac.cw_min; }));
    v.push_back(integer<int>("cw_max", [](ScenarioConfig& c) -> int& { return c.mac.cw_max; }));
    v.push_back({"rts_threshold_bytes",
                 [](ScenarioConfig& c, const std::string& k, const std::string& x) {
                   if (x == "off") {
                     c.mac.rts_threshold_bytes = std::numeric_limits<std::uint32_t>::max();
                     return;
                   }
                   const auto n = to_int(k, x);
                   if (n < 0 || n >= std::numeric_limits<std::uint32_t>::max()) fail(k, "out of range");
                   c.mac.rts_threshold_bytes = static_cast<std::uint32_t>(n);
                 },
                 [](const ScenarioConfig& c) {
                   return c.mac.rts_threshold_bytes == std::numeric_limits<std::uint32_t>::max()
                              ? std::string("off")
                              : std::to_string(c.mac.rts_threshold_bytes);
                 }});
    v.push_back(integer<int>("retry_limit", [](ScenarioConfig& c) -> int& { return c.mac.retry_limit; }));
    v.push_back(integer<std::size_t>("queue_limit", [](ScenarioConfig& c) -> std::size_t& { return c.mac.queue_limit; }));
    // routing
    v.push_back(integer<int>("zone_radius", [](ScenarioConfig& c) -> int& { return c.routing.zone_radius; }));
    v.push_back(duration("hello_interval_s", Unit::Seconds, [](ScenarioConfig& c) -> SimTime& { return c.routing.hello_interval; }));
    v.push_back(duration("tc_interval_s", Unit::Seconds, [](ScenarioConfig& c) -> SimTime& { return c.routing.tc_interval; }));
    v.push_back(integer<int>("hold_factor", [](ScenarioConfig& c) -> int& { return c.routing.hold_factor; }));
    v.push_back(duration("route_lifetime_s", Unit::Seconds, [](ScenarioConfig& c) -> SimTime& { return c.routing.route_lifetime; }));
    v.push_back(duration("discovery_wait_ms", Unit::Millis, [](ScenarioConfig& c) -> SimTime& { return c.routing.discovery_wait; }));
    v.push_back(integer<int>("discovery_retries", [](ScenarioConfig& c) -> int& { return c.routing.discovery_retries; }));
    v.push_back(integer<int>("rreq_ttl", [](ScenarioConfig& c) -> int& { return c.routing.rreq_ttl; }));
    v.push_back(duration("duplicate_horizon_s", Unit::Seconds, [](ScenarioConfig& c) -> SimTime& { return c.routing.duplicate_horizon; }));
    v.push_back(integer<std::size_t>("pending_per_dest", [](ScenarioConfig& c) -> std::size_t& { return c.routing.pending_per_dest; }));
    v.push_back(duration("pending_lifetime_s", Unit::Seconds, [](ScenarioConfig& c) -> SimTime& { return c.routing.pending_lifetime; }));
    v.push_back(integer<int>("default_ttl", [](ScenarioConfig& c) -> int& { return c.routing.default_ttl; }));
    v.push_back(duration("iarp_interval_s", Unit::Seconds, [](ScenarioConfig& c) -> SimTime& { return c.routing.iarp_interval; }));
    v.push_back(duration("iarp_hold_s", Unit::Seconds, [](ScenarioConfig& c) -> SimTime& { return c.routing.iarp_hold; }));
    v.push_back(integer<int>("ierp_max_stages", [](ScenarioConfig& c) -> int& { return c.routing.ierp_max_stages; }));
    // battery
    v.push_back(num("capacity_mah", [](ScenarioConfig& c) -> double& { return c.battery.capacity_mah; }));
    v.push_back(num("tx_ma", [](ScenarioConfig& c) -> double& { return c.battery.tx_ma; }));
    v.push_back(num("rx_ma", [](ScenarioConfig& c) -> double& { return c.battery.rx_ma; }));
    v.push_back(num("idle_ma", [](ScenarioConfig& c) -> double& { return c.battery.idle_ma; }));
    v.push_back(num("voltage_v", [](ScenarioConfig& c) -> double& { return c.battery.voltage_v; }));
    // metadata
    v.push_back(num("altitude_m", [](ScenarioConfig& c) -> double& { return c.altitude_m; }));
    v.push_back(num("weather_interval_ms", [](ScenarioConfig& c) -> double& { return c.weather_interval_ms; }));
    return v;
  }();
  return f;
}

NodeId parse_index(const std::string& key, const std::string& idx) {
  const auto n = to_int(key, idx);
  if (n < 0 || n > 1'000'000) fail(key, "bad index");
  return static_cast<NodeId>(n);
}

void set_indexed(ScenarioConfig& c, const std::string& key, const std::string& value) {
  const auto dot = key.find('.');
  const std::string base = key.substr(0, dot);
  const NodeId idx = parse_index(key, key.substr(dot + 1));
  if (base == "position") {
    c.positions[idx] = to_point(key, value);
  } else if (base == "waypoints") {
    std::vector<Vec2> pts;
    std::istringstream in(value);
    std::string tok;
    while (in >> tok) pts.push_back(to_point(key, tok));
    if (pts.empty()) fail(key, "expected at least one x,y point");
    c.waypoints[idx] = std::move(pts);
  } else if (base == "session") {
    const auto parts = split(value, ',');
    if (parts.size() != 2 && parts.size() != 4) fail(key, "expected src,dst or src,dst,start_s,stop_s");
    SessionSpec s;
    s.src = parse_index(key, parts[0]);
    s.dst = parse_index(key, parts[1]);
    if (parts.size() == 4) {
      s.start_s = to_double(key, parts[2]);
      s.stop_s = to_double(key, parts[3]);
    }
    c.sessions[static_cast<int>(idx)] = s;
  } else {
    fail(key, "unknown key");
  }
}

bool is_cw(int v) { return v > 0 && ((v + 1) & v) == 0; }

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
  ScenarioConfig c;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ValidationError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw ValidationError("line " + std::to_string(lineno) + ": empty key");
    if (!seen.insert(key).second) fail(key, "given twice");
    if (key.find('.') != std::string::npos) {
      set_indexed(c, key, value);
      continue;
    }
    const auto& fs = fields();
    auto it = std::find_if(fs.begin(), fs.end(), [&](const Field& f) { return key == f.key; });
    if (it == fs.end()) fail(key, "unknown key");
    it->set(c, key, value);
  }
  return c;
}

void validate(const ScenarioConfig& c) {
  auto require = [](bool ok, const char* key, const char* why) {
    if (!ok) fail(key, why);
  };
  require(c.width_m > 0, "width_m", "must be > 0");
  require(c.height_m > 0, "height_m", "must be > 0");
  require(c.sim_time_s >= 0, "sim_time_s", "must be >= 0");
  require(c.num_nodes >= 1, "num_nodes", "must be >= 1");
  require(c.pause_s >= 0, "pause_s", "must be >= 0");
  require(c.mobility_update_ms > 0, "mobility_update_ms", "must be > 0");
  if (c.mobility == MobilityKind::RandomWaypoint) require(c.speed_min_mps > 0, "speed_min_mps", "must be > 0");
  require(c.speed_min_mps <= c.speed_max_mps, "speed_min_mps", "must not exceed speed_max_mps");

  const Terrain terrain{c.width_m, c.height_m};
  const auto n = static_cast<NodeId>(c.num_nodes);
  for (const auto& [id, p] : c.positions) {
    const std::string key = "position." + std::to_string(id);
    if (id >= n) fail(key, "node index out of range");
    if (!terrain.contains(p)) fail(key, "outside the terrain");
  }
  for (const auto& [id, pts] : c.waypoints) {
    const std::string key = "waypoints." + std::to_string(id);
    if (id >= n) fail(key, "node index out of range");
    for (Vec2 p : pts) {
      if (!terrain.contains(p)) fail(key, "waypoint outside the terrain");
    }
  }

  require(c.session_count >= 0, "sessions", "must be >= 0");
  if (c.sessions.empty()) {
    const auto pairs = static_cast<std::int64_t>(c.num_nodes) * (c.num_nodes - 1);
    require(c.session_count <= pairs, "sessions", "more sessions than distinct ordered node pairs");
  }
  for (const auto& [k, s] : c.sessions) {
    const std::string key = "session." + std::to_string(k);
    if (s.src >= n || s.dst >= n) fail(key, "node index out of range");
    if (s.src == s.dst) fail(key, "src and dst must differ");
    if (s.start_s && *s.start_s < 0) fail(key, "start must be >= 0");
  }
  require(c.payload_bytes > 0, "payload_bytes", "must be > 0");
  require(c.interval_ms > 0, "interval_ms", "must be > 0");
  require(SimTime::from_seconds(c.interval_ms / 1e3) > SimTime{}, "interval_ms", "must be at least 1 us");
  require(c.session_start_s >= 0, "session_start_s", "must be >= 0");

  require(c.radio.max_range_m > 0, "max_range_m", "must be > 0");
  require(c.radio.bitrate_bps > 0, "bitrate_bps", "must be > 0");
  require(c.radio.frequency_hz > 0, "frequency_hz", "must be > 0");
  require(c.radio.antenna_height_m > 0, "antenna_height_m", "must be > 0");
  require(c.radio.antenna_gain_tx > 0, "antenna_gain_tx", "must be > 0");
  require(c.radio.antenna_gain_rx > 0, "antenna_gain_rx", "must be > 0");
  require(c.radio.phy_overhead >= SimTime{}, "phy_overhead_us", "must be >= 0");

  require(c.mac.slot > SimTime{}, "slot_us", "must be > 0");
  require(c.mac.sifs > SimTime{}, "sifs_us", "must be > 0");
  require(c.mac.difs == c.mac.sifs + c.mac.slot * 2, "difs_us", "must equal sifs_us + 2 * slot_us");
  require(is_cw(c.mac.cw_min), "cw_min", "must be of the form 2^k - 1");
  require(is_cw(c.mac.cw_max), "cw_max", "must be of the form 2^k - 1");
  require(c.mac.cw_min < c.mac.cw_max, "cw_min", "must be below cw_max");
  require(c.mac.retry_limit >= 0, "retry_limit", "must be >= 0");
  require(c.mac.queue_limit >= 1, "queue_limit", "must be >= 1");

  const auto& r = c.routing;
  require(r.zone_radius >= 1, "zone_radius", "must be >= 1");
  require(r.hello_interval > SimTime{}, "hello_interval_s", "must be > 0");
  require(r.tc_interval > SimTime{}, "tc_interval_s", "must be > 0");
  require(r.hold_factor >= 1, "hold_factor", "must be >= 1");
  require(r.route_lifetime > SimTime{}, "route_lifetime_s", "must be > 0");
  require(r.discovery_wait > SimTime{}, "discovery_wait_ms", "must be > 0");
  require(r.discovery_retries >= 0 && r.discovery_retries <= 30, "discovery_retries", "must be in [0, 30]");
  require(r.rreq_ttl >= 1, "rreq_ttl", "must be >= 1");
  require(r.duplicate_horizon > SimTime{}, "duplicate_horizon_s", "must be > 0");
  require(r.pending_per_dest >= 1, "pending_per_dest", "must be >= 1");
  require(r.pending_lifetime > SimTime{}, "pending_lifetime_s", "must be > 0");
  require(r.default_ttl >= 1, "default_ttl", "must be >= 1");
  require(r.iarp_interval > SimTime{}, "iarp_interval_s", "must be > 0");
  require(r.iarp_hold > SimTime{}, "iarp_hold_s", "must be > 0");
  require(r.ierp_max_stages >= 1, "ierp_max_stages", "must be >= 1");

  require(c.battery.capacity_mah > 0, "capacity_mah", "must be > 0");
  require(c.battery.tx_ma >= 0, "tx_ma", "must be >= 0");
  require(c.battery.rx_ma >= 0, "rx_ma", "must be >= 0");
  require(c.battery.idle_ma >= 0, "idle_ma", "must be >= 0");
  require(c.battery.voltage_v > 0, "voltage_v", "must be > 0");
  require(c.weather_interval_ms >= 0, "weather_interval_ms", "must be >= 0");
}

ScenarioConfig load_scenario_text(const std::string& text) {
  ScenarioConfig c = parse_scenario(text);
  validate(c);
  return c;
}

const std::string& bundled_table1() {
  static const std::string text(kTable1Scenario);
  return text;
}

ScenarioConfig load_scenario(const std::string& path_or_name) {
  if (path_or_name == "table1") return load_scenario_text(bundled_table1());
  std::ifstream in(path_or_name);
  if (!in) throw ValidationError(path_or_name + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario_text(buf.str());
}

namespace {
std::string echo(const ScenarioConfig& c, bool with_identity) {
  std::ostringstream out;
  for (const Field& f : fields()) {
    if (f.identity && !with_identity) continue;
    out << f.key << " = " << f.get(c) << '\n';
  }
  for (const auto& [id, p] : c.positions) out << "position." << id << " = " << fmt_point(p) << '\n';
  for (const auto& [id, pts] : c.waypoints) {
    out << "waypoints." << id << " =";
    for (Vec2 p : pts) out << ' ' << fmt_point(p);
    out << '\n';
  }
  for (const auto& [k, s] : c.sessions) {
    out << "session." << k << " = " << s.src << ',' << s.dst;
    if (s.start_s && s.stop_s) out << ',' << fmt(*s.start_s) << ',' << fmt(*s.stop_s);
    out << '\n';
  }
  return out.str();
}
}  // namespace

std::string resolved_echo(const ScenarioConfig& c) { return echo(c, true); }

std::string scenario_hash(const ScenarioConfig& c) {
  // FNV-1a, 64 bit.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : echo(c, false)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace vanetsim
