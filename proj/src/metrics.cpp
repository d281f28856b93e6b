#include "vanetsim/metrics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>

namespace vanetsim {

std::string format_metric(const MetricValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&v)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", *d);
    return buf;
  }
  return std::get<std::string>(v);
}

void MetricsLedger::set(const std::string& scope, std::uint64_t id, const std::string& metric, MetricValue value) {
  rows_[{scope, id, metric}] = std::move(value);
}

const MetricValue* MetricsLedger::get(const std::string& scope, std::uint64_t id, const std::string& metric) const {
  auto it = rows_.find({scope, id, metric});
  return it == rows_.end() ? nullptr : &it->second;
}

double MetricsLedger::number(const std::string& scope, std::uint64_t id, const std::string& metric) const {
  const MetricValue* v = get(scope, id, metric);
  if (!v) throw std::out_of_range("metric missing: " + scope + "/" + std::to_string(id) + "/" + metric);
  if (const auto* i = std::get_if<std::int64_t>(v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(v)) return *d;
  throw std::invalid_argument("metric is not numeric: " + metric);
}

std::string MetricsLedger::to_csv() const {
  std::string out = "scope,id,metric,value\n";
  for (const auto& [key, value] : rows_) {
    const auto& [scope, id, metric] = key;
    out += scope;
    out += ',';
    out += std::to_string(id);
    out += ',';
    out += metric;
    out += ',';
    out += format_metric(value);
    out += '\n';
  }
  return out;
}

namespace {
MetricValue parse_value(const std::string& s) {
  std::int64_t i = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), i);
  if (ec == std::errc{} && p == s.data() + s.size()) return i;
  double d = 0;
  auto [q, ec2] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (ec2 == std::errc{} && q == s.data() + s.size()) return d;
  return s;
}
}  // namespace

MetricsLedger MetricsLedger::from_csv(const std::string& text) {
  MetricsLedger ledger;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "scope,id,metric,value") throw CompareError("metrics: bad header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<std::string, 4> cols;
    std::size_t start = 0;
    for (int c = 0; c < 3; ++c) {
      const auto comma = line.find(',', start);
      if (comma == std::string::npos) throw CompareError("metrics: malformed row '" + line + "'");
      cols[c] = line.substr(start, comma - start);
      start = comma + 1;
    }
    cols[3] = line.substr(start);
    std::uint64_t id = 0;
    auto [p, ec] = std::from_chars(cols[1].data(), cols[1].data() + cols[1].size(), id);
    if (ec != std::errc{}) throw CompareError("metrics: bad id in '" + line + "'");
    const bool text = cols[2] == "protocol" || cols[2] == "scenario_hash";
    ledger.set(cols[0], id, cols[2], text ? MetricValue{cols[3]} : parse_value(cols[3]));
  }
  return ledger;
}

RunRecord RunRecord::from_ledger(const MetricsLedger& ledger) {
  RunRecord r;
  for (const auto& [key, value] : ledger.rows()) {
    const auto& [scope, id, metric] = key;
    if (scope != "run") continue;
    if (metric == "protocol") {
      r.protocol = format_metric(value);
    } else if (metric == "scenario_hash") {
      r.scenario_hash = format_metric(value);
    } else if (metric == "seed") {
      r.seed = static_cast<std::uint64_t>(ledger.number(scope, id, metric));
    } else if (!std::holds_alternative<std::string>(value)) {
      r.metrics[metric] = ledger.number(scope, id, metric);
    }
  }
  return r;
}

const std::vector<std::string>& ranked_metrics() {
  static const std::vector<std::string> m = {
      "dcf_broadcasts_sent",
      "dcf_broadcasts_received",
      "mac_packets_from_network",
      "signals_received_without_errors",
      "signals_received_with_errors",
      "residual_battery_mah",
      "mac_unicast_drops",
      "queue_drops",
      "app_sent",
      "app_received",
      "delivery_ratio",
      "routing_control_sent",
  };
  return m;
}

RankingReport compare_runs(const std::vector<RunRecord>& runs) {
  if (runs.empty()) throw CompareError("compare: no runs");
  const std::string& hash = runs.front().scenario_hash;
  std::map<std::string, std::set<std::uint64_t>> seeds_by_protocol;
  for (const RunRecord& r : runs) {
    if (r.scenario_hash != hash) {
      throw CompareError("compare: runs come from different scenarios (" + hash + " vs " + r.scenario_hash + ")");
    }
    if (!seeds_by_protocol[r.protocol].insert(r.seed).second) {
      throw CompareError("compare: duplicate run for " + r.protocol + " seed " + std::to_string(r.seed));
    }
  }
  if (seeds_by_protocol.size() < 2) throw CompareError("compare: need at least two protocols to rank");
  const auto& reference = seeds_by_protocol.begin()->second;
  for (const auto& [p, seeds] : seeds_by_protocol) {
    if (seeds != reference) throw CompareError("compare: protocol " + p + " was run over a different seed set");
  }

  RankingReport report;
  for (const auto& [p, s] : seeds_by_protocol) report.protocols.push_back(p);
  report.seeds.assign(reference.begin(), reference.end());

  for (const std::string& metric : ranked_metrics()) {
    std::vector<RankRow> rows;
    for (const std::string& p : report.protocols) {
      double sum = 0;
      std::size_t n = 0;
      for (const RunRecord& r : runs) {
        if (r.protocol != p) continue;
        auto it = r.metrics.find(metric);
        if (it == r.metrics.end()) throw CompareError("compare: run lacks metric " + metric);
        sum += it->second;
        ++n;
      }
      rows.push_back({metric, p, sum / static_cast<double>(n), 0});
    }
    std::sort(rows.begin(), rows.end(), [](const RankRow& a, const RankRow& b) {
      if (a.mean != b.mean) return a.mean > b.mean;
      return a.protocol < b.protocol;
    });
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rank = static_cast<int>(i + 1);
    report.rows.insert(report.rows.end(), rows.begin(), rows.end());
  }
  return report;
}

int RankingReport::rank_of(const std::string& metric, const std::string& protocol) const {
  for (const RankRow& r : rows) {
    if (r.metric == metric && r.protocol == protocol) return r.rank;
  }
  return 0;
}

double RankingReport::mean_of(const std::string& metric, const std::string& protocol) const {
  for (const RankRow& r : rows) {
    if (r.metric == metric && r.protocol == protocol) return r.mean;
  }
  return 0.0;
}

std::string RankingReport::to_csv() const {
  std::string out = "metric,protocol,mean,rank\n";
  for (const RankRow& r : rows) {
    out += r.metric + "," + r.protocol + "," + format_metric(r.mean) + "," + std::to_string(r.rank) + "\n";
  }
  return out;
}

std::string RankingReport::summary() const {
  std::ostringstream out;
  std::string current;
  for (const RankRow& r : rows) {
    if (r.metric != current) {
      if (!current.empty()) out << '\n';
      current = r.metric;
      out << r.metric << ':';
    }
    out << ' ' << r.rank << '.' << r.protocol << '(' << format_metric(r.mean) << ')';
  }
  if (!current.empty()) out << '\n';
  return out.str();
}

}  // namespace vanetsim
