#include "vanetsim/network.hpp"

#include <algorithm>

namespace vanetsim {

// ---- Node ------------------------------------------------------------------

Node::Node(Network& net, NodeId id, const ScenarioConfig& cfg)
    : net_(net),
      id_(id),
      protocol_rng_(net.root_rng().substream(RngConcern::Protocol, id)),
      energy_(cfg.battery) {
  mac_ = std::make_unique<Dcf>(id, net.scheduler(), net.channel(), cfg.mac,
                               net.root_rng().substream(RngConcern::Backoff, id), this);
  net.channel().attach(id, mac_.get());
  agent_ = make_agent(cfg.protocol, *this, net.config().routing);
}

SimTime Node::now() const { return net_.scheduler().now(); }

void Node::send(NetPacket packet, NodeId next_hop) {
  mac_->enqueue(std::make_shared<const NetPacket>(std::move(packet)), next_hop);
}

void Node::deliver(const NetPacket& packet) { net_.on_deliver(packet); }

Ticket Node::set_timer(SimTime delay, std::function<void()> fn) {
  return net_.scheduler().schedule_in(delay, id_, EventKind::TimerExpiry, [this, fn = std::move(fn)] {
    if (!dead_) fn();
  });
}

void Node::cancel_timer(Ticket t) { net_.scheduler().cancel(t); }

std::uint64_t Node::new_uid() { return net_.next_uid(); }

void Node::mac_deliver(std::shared_ptr<const NetPacket> packet, NodeId from) {
  if (!dead_) agent_->handle_packet(*packet, from);
}

void Node::mac_unicast_failed(std::shared_ptr<const NetPacket> packet, NodeId next_hop) {
  if (!dead_) agent_->on_link_failure(next_hop, *packet);
}

void Node::check_battery() {
  if (dead_) return;
  energy_.settle(now());
  if (!energy_.battery().depleted()) return;
  power_off();
}

void Node::power_off() {
  if (dead_) return;
  dead_ = true;
  mac_->shutdown();
  net_.channel().set_enabled(id_, false);
}

// ---- Network ---------------------------------------------------------------

std::vector<MobilityModel::NodeSpec> mobility_specs(const ScenarioConfig& cfg, RngStream& rng) {
  const Terrain terrain{cfg.width_m, cfg.height_m};
  std::vector<MobilityModel::NodeSpec> specs(static_cast<std::size_t>(cfg.num_nodes));
  for (std::size_t i = 0; i < specs.size(); ++i) {
    auto& s = specs[i];
    const auto id = static_cast<NodeId>(i);
    // Always draw, so pinning one node does not shift the others.
    const Vec2 drawn = uniform_point(terrain, rng);
    auto pos = cfg.positions.find(id);
    s.initial = pos != cfg.positions.end() ? pos->second : drawn;
    if (auto wp = cfg.waypoints.find(id); wp != cfg.waypoints.end()) {
      s.kind = MobilityModel::Kind::Scripted;
      s.script = wp->second;
    } else {
      s.kind = cfg.mobility == MobilityKind::Static ? MobilityModel::Kind::Static
                                                    : MobilityModel::Kind::RandomWaypoint;
    }
  }
  return specs;
}

std::vector<CbrSession> resolve_sessions(const ScenarioConfig& cfg, RngStream& rng) {
  const SimTime start = SimTime::from_seconds(cfg.session_start_s);
  const SimTime stop = SimTime::from_seconds(cfg.session_stop_s.value_or(cfg.sim_time_s));
  const SimTime interval = SimTime::from_seconds(cfg.interval_ms / 1e3);
  std::vector<CbrSession> out;
  auto add = [&](NodeId src, NodeId dst, SimTime a, SimTime b) {
    CbrSession s;
    s.id = static_cast<std::uint32_t>(out.size());
    s.src = src;
    s.dst = dst;
    s.payload_bytes = cfg.payload_bytes;
    s.interval = interval;
    s.start = a;
    s.stop = b;
    out.push_back(s);
  };
  if (!cfg.sessions.empty()) {
    for (const auto& [k, spec] : cfg.sessions) {
      add(spec.src, spec.dst, spec.start_s ? SimTime::from_seconds(*spec.start_s) : start,
          spec.stop_s ? SimTime::from_seconds(*spec.stop_s) : stop);
    }
    return out;
  }
  for (auto [src, dst] :
       draw_session_pairs(static_cast<std::size_t>(cfg.num_nodes), static_cast<std::size_t>(cfg.session_count), rng)) {
    add(src, dst, start, stop);
  }
  // Drawn sessions start at a random phase inside the first interval so that
  // sources do not fire in the same microsecond.
  for (CbrSession& s : out) s.start += SimTime::micros(rng.uniform_int(0, interval.us() - 1));
  return out;
}

namespace {
const ScenarioConfig& checked(const ScenarioConfig& cfg) {
  validate(cfg);
  return cfg;
}

MobilityModel build_mobility(const ScenarioConfig& cfg, const RngStream& root) {
  RngStream placement = root.substream(RngConcern::Mobility, 1);
  return MobilityModel(Terrain{cfg.width_m, cfg.height_m},
                       WaypointParams{cfg.speed_min_mps, cfg.speed_max_mps, SimTime::from_seconds(cfg.pause_s)},
                       mobility_specs(cfg, placement), root.substream(RngConcern::Mobility, 0));
}
}  // namespace

Network::Network(const ScenarioConfig& cfg)
    : cfg_(checked(cfg)),
      end_(cfg.sim_time()),
      root_(cfg.seed),
      mobility_(build_mobility(cfg_, root_)),
      channel_(sched_, cfg_.radio, static_cast<std::size_t>(cfg_.num_nodes),
               [this](NodeId n) { return mobility_.position(n); }) {
  for (NodeId i = 0; i < static_cast<NodeId>(cfg_.num_nodes); ++i) {
    nodes_.push_back(std::make_unique<Node>(*this, i, cfg_));
  }
  channel_.set_mode_observer([this](NodeId n, RadioMode m) { nodes_[n]->energy().set_mode(m, sched_.now()); });
  RngStream topology = root_.substream(RngConcern::Topology);
  sessions_ = resolve_sessions(cfg_, topology);
  stats_.resize(sessions_.size());
  next_app_seq_.assign(sessions_.size(), 0);
}

void Network::schedule_session(std::size_t index, SimTime at) {
  const CbrSession& s = sessions_[index];
  if (at >= s.stop || at > end_) return;
  sched_.schedule(at, s.src, EventKind::AppSend, [this, index, at] {
    const CbrSession& session = sessions_[index];
    NetPacket p;
    p.uid = next_uid();
    p.src = session.src;
    p.dst = session.dst;
    p.ttl = cfg_.routing.default_ttl;
    p.type = MessageType::Data;
    p.body_bytes = session.payload_bytes;
    p.session = session.id;
    p.app_seq = next_app_seq_[index]++;
    p.created = sched_.now();
    ++stats_[index].app_sent;
    Node& src = *nodes_[session.src];
    if (!src.dead()) src.agent().handle_app_packet(std::move(p));
    schedule_session(index, at + session.interval);
  });
}

void Network::mobility_tick() {
  mobility_.advance(sched_.now());
  for (auto& n : nodes_) n->check_battery();
  const SimTime tick = SimTime::from_seconds(cfg_.mobility_update_ms / 1e3);
  if (sched_.now() + tick <= end_) {
    sched_.schedule_in(tick, kWorld, EventKind::MobilityUpdate, [this] { mobility_tick(); });
  }
}

void Network::run_until(SimTime t) {
  if (!started_) {
    started_ = true;
    for (auto& n : nodes_) n->agent().start();
    for (std::size_t i = 0; i < sessions_.size(); ++i) schedule_session(i, sessions_[i].start);
    const SimTime tick = SimTime::from_seconds(cfg_.mobility_update_ms / 1e3);
    if (tick <= end_) sched_.schedule(tick, kWorld, EventKind::MobilityUpdate, [this] { mobility_tick(); });
  }
  sched_.run_until(std::min(t, end_));
}

MetricsLedger Network::run() {
  run_until(end_);
  return ledger();
}

void Network::inject(NodeId src, NodeId dst, std::uint32_t payload_bytes) {
  NetPacket p;
  p.uid = next_uid();
  p.src = src;
  p.dst = dst;
  p.ttl = cfg_.routing.default_ttl;
  p.type = MessageType::Data;
  p.body_bytes = payload_bytes;
  p.session = kNoSession;
  p.created = sched_.now();
  nodes_.at(src)->agent().handle_app_packet(std::move(p));
}

void Network::on_deliver(const NetPacket& packet) {
  if (packet.session == kNoSession || packet.session >= stats_.size()) {
    ++injected_delivered_;
    return;
  }
  stats_[packet.session].record(packet.app_seq, sched_.now() - packet.created);
}

MetricsLedger Network::ledger() const {
  MetricsLedger L;
  const SimTime now = sched_.now();
  auto i64 = [](std::uint64_t v) { return static_cast<std::int64_t>(v); };

  std::map<std::string, std::int64_t> totals;
  double residual_sum = 0;
  double residual_min = cfg_.battery.capacity_mah;
  double drawn_sum = 0;

  for (const auto& np : nodes_) {
    const Node& n = *np;
    const NodeId id = n.self();
    const MacCounters& m = n.mac().counters();
    const RoutingCounters& r = n.routing_counters();
    EnergyMeter e = n.energy();
    e.settle(now);

    const std::vector<std::pair<const char*, std::uint64_t>> ints = {
        {"dcf_broadcasts_sent", m.dcf_broadcasts_sent},
        {"dcf_broadcasts_received", m.dcf_broadcasts_received},
        {"mac_packets_from_network", m.mac_packets_from_network},
        {"signals_received_without_errors", m.signals_received_without_errors},
        {"signals_received_with_errors", m.signals_received_with_errors},
        {"reception_ends", channel_.stats(id).reception_ends},
        {"transmissions", channel_.stats(id).transmissions},
        {"mac_unicast_drops", m.mac_unicast_drops},
        {"queue_drops", m.queue_drops},
        {"unicast_attempts", m.unicast_attempts},
        {"unicast_success", m.unicast_success},
        {"rts_sent", m.rts_sent},
        {"cts_sent", m.cts_sent},
        {"ack_sent", m.ack_sent},
        {"data_unicast_sent", m.data_unicast_sent},
        {"duplicates_suppressed", m.duplicates_suppressed},
        {"data_originated", r.data_originated},
        {"data_forwarded", r.data_forwarded},
        {"data_delivered", r.data_delivered},
        {"no_route_drops", r.no_route_drops},
        {"ttl_drops", r.ttl_drops},
        {"pending_drops", r.pending_drops},
        {"link_failures", r.link_failures},
        {"link_drops", r.link_drops},
        {"loop_drops", r.loop_drops},
        {"discoveries", r.discoveries},
        {"control_dropped", r.control_dropped},
        {"routing_control_sent", r.total_control_sent()},
        {"time_idle_us", static_cast<std::uint64_t>(e.time_in(RadioMode::Idle).us())},
        {"time_rx_us", static_cast<std::uint64_t>(e.time_in(RadioMode::Rx).us())},
        {"time_tx_us", static_cast<std::uint64_t>(e.time_in(RadioMode::Tx).us())},
        {"dead", n.dead() ? 1u : 0u},
    };
    for (const auto& [name, v] : ints) {
      L.set("node", id, name, i64(v));
      totals[name] += i64(v);
    }
    L.set("node", id, "residual_battery_mah", e.battery().residual_mah());
    L.set("node", id, "energy_drawn_mah", e.battery().drawn_mah());
    residual_sum += e.battery().residual_mah();
    residual_min = std::min(residual_min, e.battery().residual_mah());
    drawn_sum += e.battery().drawn_mah();
    for (std::size_t t = 0; t < kMessageTypeCount; ++t) {
      totals[std::string("control_sent.") + std::string(to_string(static_cast<MessageType>(t)))] +=
          i64(r.control_sent[t]);
    }
  }

  std::int64_t app_sent = 0;
  std::int64_t app_received = 0;
  SimTime delay_sum{};
  for (std::size_t i = 0; i < sessions_.size(); ++i) {
    const CbrSession& s = sessions_[i];
    const SessionStats& st = stats_[i];
    L.set("session", s.id, "src", std::int64_t{s.src});
    L.set("session", s.id, "dst", std::int64_t{s.dst});
    L.set("session", s.id, "app_sent", i64(st.app_sent));
    L.set("session", s.id, "app_received", i64(st.app_received));
    L.set("session", s.id, "app_duplicates", i64(st.app_duplicates));
    L.set("session", s.id, "delivery_ratio",
          st.app_sent == 0 ? 0.0 : static_cast<double>(st.app_received) / static_cast<double>(st.app_sent));
    L.set("session", s.id, "mean_delay_s", st.mean_delay_s());
    L.set("session", s.id, "max_delay_s", st.delay_max.to_seconds());
    app_sent += i64(st.app_sent);
    app_received += i64(st.app_received);
    delay_sum += st.delay_sum;
  }

  for (const auto& [name, v] : totals) L.set("run", 0, name, v);
  const double nodes = static_cast<double>(std::max<std::size_t>(nodes_.size(), 1));
  L.set("run", 0, "residual_battery_mah", residual_sum / nodes);
  L.set("run", 0, "residual_battery_min_mah", residual_min);
  L.set("run", 0, "energy_drawn_mah", drawn_sum);
  L.set("run", 0, "app_sent", app_sent);
  L.set("run", 0, "app_received", app_received);
  L.set("run", 0, "delivery_ratio",
        app_sent == 0 ? 0.0 : static_cast<double>(app_received) / static_cast<double>(app_sent));
  L.set("run", 0, "mean_delay_s",
        app_received == 0 ? 0.0 : delay_sum.to_seconds() / static_cast<double>(app_received));
  L.set("run", 0, "protocol", std::string(to_string(cfg_.protocol)));
  L.set("run", 0, "seed", static_cast<std::int64_t>(cfg_.seed));
  L.set("run", 0, "scenario_hash", scenario_hash(cfg_));
  L.set("run", 0, "num_nodes", std::int64_t{cfg_.num_nodes});
  L.set("run", 0, "sessions", static_cast<std::int64_t>(sessions_.size()));
  L.set("run", 0, "sim_time_s", now.to_seconds());
  L.set("run", 0, "events_dispatched", i64(sched_.dispatched()));
  return L;
}

}  // namespace vanetsim
