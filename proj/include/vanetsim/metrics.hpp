#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

namespace vanetsim {

using MetricValue = std::variant<std::int64_t, double, std::string>;

/// Renders integers plainly, doubles with six decimals, strings verbatim.
std::string format_metric(const MetricValue& v);

/// Flat (scope, id, metric) -> value store. Rows are kept in canonical
/// order: scope, then numeric id, then metric name.
class MetricsLedger {
 public:
  void set(const std::string& scope, std::uint64_t id, const std::string& metric, MetricValue value);
  const MetricValue* get(const std::string& scope, std::uint64_t id, const std::string& metric) const;
  /// Numeric value (integers widened); throws if missing or a string.
  double number(const std::string& scope, std::uint64_t id, const std::string& metric) const;

  std::size_t size() const { return rows_.size(); }
  /// CSV with header `scope,id,metric,value`.
  std::string to_csv() const;
  static MetricsLedger from_csv(const std::string& text);

  bool operator==(const MetricsLedger&) const = default;

  using Key = std::tuple<std::string, std::uint64_t, std::string>;
  const std::map<Key, MetricValue>& rows() const { return rows_; }

 private:
  std::map<Key, MetricValue> rows_;
};

class CompareError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One simulation's run-scope summary.
struct RunRecord {
  std::string protocol;
  std::uint64_t seed = 0;
  std::string scenario_hash;
  std::map<std::string, double> metrics;

  static RunRecord from_ledger(const MetricsLedger& ledger);
};

struct RankRow {
  std::string metric;
  std::string protocol;
  double mean = 0;
  int rank = 0;
};

struct RankingReport {
  std::vector<RankRow> rows;  // by metric, then rank
  std::vector<std::string> protocols;
  std::vector<std::uint64_t> seeds;

  /// Rank of a protocol on a metric; 0 if absent.
  int rank_of(const std::string& metric, const std::string& protocol) const;
  double mean_of(const std::string& metric, const std::string& protocol) const;
  /// Header `metric,protocol,mean,rank`.
  std::string to_csv() const;
  /// One line per metric, best first.
  std::string summary() const;
};

/// Means per (metric, protocol) over seeds and ranks them, rank 1 being the
/// largest mean; equal means rank by protocol name. Needs at least two
/// protocols, one scenario hash, and the same seed set for every protocol.
RankingReport compare_runs(const std::vector<RunRecord>& runs);

/// Run-scope metrics that take part in ranking.
const std::vector<std::string>& ranked_metrics();

}  // namespace vanetsim
