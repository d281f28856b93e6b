// vanetsim: run, compare and validate MANET routing scenarios.

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "vanetsim/network.hpp"

namespace fs = std::filesystem;
using namespace vanetsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitInternal = 2;

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ValidationError(p.string() + ": cannot write");
  out << text;
}

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> out;
  auto num = [&](const std::string& s) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw ValidationError("--seeds: bad seed '" + s + "'");
    return static_cast<std::uint64_t>(v);
  };
  std::stringstream in(spec);
  std::string part;
  while (std::getline(in, part, ',')) {
    if (auto dots = part.find(".."); dots != std::string::npos) {
      const auto a = num(part.substr(0, dots));
      const auto b = num(part.substr(dots + 2));
      if (b < a) throw ValidationError("--seeds: empty range '" + part + "'");
      for (auto s = a; s <= b; ++s) out.push_back(s);
    } else {
      out.push_back(num(part));
    }
  }
  if (out.empty()) throw ValidationError("--seeds: no seeds given");
  return out;
}

struct RunOutput {
  MetricsLedger ledger;
  double wall_s = 0;
};

RunOutput simulate(const ScenarioConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Network net(cfg);
  RunOutput out;
  out.ledger = net.run();
  out.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

void write_run(const fs::path& dir, const ScenarioConfig& cfg, const RunOutput& r) {
  fs::create_directories(dir);
  write_file(dir / "metrics.csv", r.ledger.to_csv());
  write_file(dir / "scenario.resolved.scn", resolved_echo(cfg));
  nlohmann::ordered_json j;
  j["scenario"] = cfg.name;
  j["scenario_hash"] = scenario_hash(cfg);
  j["protocol"] = std::string(to_string(cfg.protocol));
  j["seed"] = cfg.seed;
  j["sim_time_s"] = cfg.sim_time_s;
  j["events_dispatched"] = static_cast<std::int64_t>(r.ledger.number("run", 0, "events_dispatched"));
  j["app_sent"] = static_cast<std::int64_t>(r.ledger.number("run", 0, "app_sent"));
  j["app_received"] = static_cast<std::int64_t>(r.ledger.number("run", 0, "app_received"));
  j["wall_clock_s"] = r.wall_s;
  write_file(dir / "run.json", j.dump(2) + "\n");
}

ScenarioConfig with_overrides(ScenarioConfig cfg, const std::optional<std::uint64_t>& seed,
                              const std::optional<std::string>& protocol) {
  if (seed) cfg.seed = *seed;
  if (protocol) {
    auto p = parse_protocol(*protocol);
    if (!p) throw ValidationError("--protocol: expected one of aodv, dymo, olsr, zrp, got '" + *protocol + "'");
    cfg.protocol = *p;
  }
  validate(cfg);
  return cfg;
}

int cmd_run(const std::string& scenario, std::optional<std::uint64_t> seed, std::optional<std::string> protocol,
            const std::string& out) {
  const ScenarioConfig cfg = with_overrides(load_scenario(scenario), seed, protocol);
  const RunOutput r = simulate(cfg);
  write_run(out, cfg, r);
  std::cout << "run " << cfg.name << " protocol=" << to_string(cfg.protocol) << " seed=" << cfg.seed
            << " delivered=" << format_metric(r.ledger.number("run", 0, "delivery_ratio")) << " -> " << out << "\n";
  return kExitOk;
}

int cmd_compare(const std::string& scenario, const std::string& protocols_arg, const std::string& seeds_arg,
                const std::string& out, unsigned jobs) {
  const ScenarioConfig base = load_scenario(scenario);
  std::vector<Protocol> protocols;
  std::stringstream in(protocols_arg);
  std::string name;
  while (std::getline(in, name, ',')) {
    auto p = parse_protocol(name);
    if (!p) throw ValidationError("--protocols: unknown protocol '" + name + "'");
    if (std::find(protocols.begin(), protocols.end(), *p) != protocols.end()) {
      std::cerr << "warning: protocol " << name << " listed twice; running it once\n";
      continue;
    }
    protocols.push_back(*p);
  }
  if (protocols.size() < 2) throw ValidationError("--protocols: need at least two distinct protocols");
  const auto seeds = parse_seeds(seeds_arg);

  std::vector<ScenarioConfig> configs;
  for (Protocol p : protocols) {
    for (auto s : seeds) {
      ScenarioConfig c = base;
      c.protocol = p;
      c.seed = s;
      validate(c);
      configs.push_back(c);
    }
  }

  std::vector<RunRecord> records(configs.size());
  std::atomic<std::size_t> next{0};
  std::mutex io;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        const RunOutput r = simulate(configs[i]);
        const fs::path dir = fs::path(out) / (std::string(to_string(configs[i].protocol)) + "-seed" +
                                              std::to_string(configs[i].seed));
        write_run(dir, configs[i], r);
        // Rank from the serialized form, exactly as a later re-compare would.
        records[i] = RunRecord::from_ledger(MetricsLedger::from_csv(r.ledger.to_csv()));
        std::lock_guard lock(io);
        std::cout << "  " << to_string(configs[i].protocol) << " seed " << configs[i].seed << " done ("
                  << format_metric(r.wall_s) << " s)\n";
      } catch (...) {
        std::lock_guard lock(io);
        if (!failure) failure = std::current_exception();
        next = configs.size();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < std::max(1u, jobs); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  const RankingReport report = compare_runs(records);
  fs::create_directories(out);
  write_file(fs::path(out) / "ranking.csv", report.to_csv());
  write_file(fs::path(out) / "ranking.txt", report.summary());
  write_file(fs::path(out) / "scenario.resolved.scn", resolved_echo(base));
  std::cout << report.summary();
  return kExitOk;
}

int cmd_validate(const std::string& scenario) {
  const ScenarioConfig cfg = load_scenario(scenario);
  std::cout << resolved_echo(cfg);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event MANET routing simulator (AODV, DYMO, OLSR, ZRP over 802.11 DCF)"};
  app.require_subcommand(1);

  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> protocol;
  std::string out = "out";
  std::string protocols = "aodv,dymo,olsr,zrp";
  std::string seeds = "1..10";
  unsigned jobs = 1;

  auto* run = app.add_subcommand("run", "Run one simulation");
  run->add_option("scenario", scenario, "Scenario file, or 'table1' for the bundled default")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--protocol", protocol, "Override the routing protocol");
  run->add_option("--out", out, "Output directory");

  auto* compare = app.add_subcommand("compare", "Run every protocol x seed and rank the protocols");
  compare->add_option("scenario", scenario, "Scenario file, or 'table1'")->required();
  compare->add_option("--protocols", protocols, "Comma-separated protocols");
  compare->add_option("--seeds", seeds, "Seeds: N, A..B, or a comma list");
  compare->add_option("--out", out, "Output directory");
  compare->add_option("--jobs", jobs, "Concurrent runs");

  auto* check = app.add_subcommand("validate", "Parse and validate a scenario, printing the resolved config");
  check->add_option("scenario", scenario, "Scenario file, or 'table1'")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*run) return cmd_run(scenario, seed, protocol, out);
    if (*compare) return cmd_compare(scenario, protocols, seeds, out, jobs);
    if (*check) return cmd_validate(scenario);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const CompareError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ContractViolation& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
