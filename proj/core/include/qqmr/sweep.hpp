// Parameter sweeps over independent seeded runs and their aggregation.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qqmr/config.hpp"
#include "qqmr/metrics.hpp"
#include "qqmr/simulation.hpp"

namespace qqmr {

enum class Scenario : std::uint8_t { density, rate };

std::string_view to_string(Scenario scenario);
std::optional<Scenario> parse_scenario(std::string_view text);

/// Config key varied by the scenario: node_count or send_rate.
std::string_view parameter_name(Scenario scenario);

/// {50, 100, 200, 400} nodes or {5, 10, 20, 50} packets/s.
std::vector<double> default_grid(Scenario scenario);

SimConfig apply_parameter(SimConfig config, Scenario scenario, double value);

/// Accepts "7", "1..10" and "1,4,9" (mixable: "1..3,8").
std::vector<std::uint64_t> parse_seeds(std::string_view text);

enum class Metric : std::uint8_t { pdr, eed, ro, ec, hc };
inline constexpr std::size_t kMetricCount = 5;
std::string_view to_string(Metric metric);

struct RunSpec {
  Protocol protocol = Protocol::qqmr;
  Scenario scenario = Scenario::density;
  double param_value = 0.0;
  std::uint64_t seed = 0;
  SimConfig config;
};

struct RunRecord {
  Protocol protocol = Protocol::qqmr;
  Scenario scenario = Scenario::density;
  std::string param_name;
  double param_value = 0.0;
  std::uint64_t seed = 0;
  double pdr_pct = 0.0;
  std::optional<double> eed_s;
  double ro = 0.0;
  double ec_j = 0.0;
  std::optional<double> hc;
  std::optional<std::size_t> converged_episode;

  std::optional<double> metric(Metric m) const;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct RunOutcome {
  RunRecord record;
  MetricsReport report;
  ClosureCheck closure;
};

struct SweepPlan {
  SimConfig base;
  Scenario scenario = Scenario::density;
  std::vector<double> grid;
  std::vector<Protocol> protocols;
  std::vector<std::uint64_t> seeds;
};

/// Cross product grid x protocols x seeds in that nesting order.
std::vector<RunSpec> plan_runs(const SweepPlan& plan);

RunOutcome execute_run(const RunSpec& spec, const SimulationOptions& options = {});

/// Runs every spec on up to `jobs` worker threads. Results keep spec order.
std::vector<RunOutcome> execute_runs(std::span<const RunSpec> specs, unsigned jobs,
                                     const SimulationOptions& options = {});

struct CellStats {
  Protocol protocol = Protocol::qqmr;
  double param_value = 0.0;
  std::size_t n = 0;  // runs with a value for the metric
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for n < 2
};

/// One cell per (protocol, param_value), ordered by protocol then value.
std::vector<CellStats> aggregate(std::span<const RunRecord> records, Metric metric);

/// Spearman rank correlation with average ranks for ties. Returns 0 when
/// either side is constant. Throws std::invalid_argument on size mismatch or
/// fewer than two points.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace qqmr
