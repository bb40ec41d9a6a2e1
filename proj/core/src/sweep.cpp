#include "qqmr/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

namespace qqmr {

std::string_view to_string(Scenario scenario) {
  return scenario == Scenario::density ? "density" : "rate";
}

std::optional<Scenario> parse_scenario(std::string_view text) {
  if (text == "density") return Scenario::density;
  if (text == "rate") return Scenario::rate;
  return std::nullopt;
}

std::string_view parameter_name(Scenario scenario) {
  return scenario == Scenario::density ? "node_count" : "send_rate";
}

std::vector<double> default_grid(Scenario scenario) {
  if (scenario == Scenario::density) return {50, 100, 200, 400};
  return {5, 10, 20, 50};
}

SimConfig apply_parameter(SimConfig config, Scenario scenario, double value) {
  if (scenario == Scenario::density) {
    if (value < 2 || value != std::floor(value)) {
      throw ConfigError("node_count", "grid value must be an integer >= 2");
    }
    config.node_count = static_cast<std::uint32_t>(value);
  } else {
    if (!(value > 0.0)) throw ConfigError("send_rate", "grid value must be > 0");
    config.send_rate = value;
  }
  return config;
}

namespace {

std::uint64_t parse_u64(std::string_view text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw std::invalid_argument("bad seed: '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

std::vector<std::uint64_t> parse_seeds(std::string_view text) {
  std::vector<std::uint64_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string_view item = text.substr(start, comma - start);
    const std::size_t dots = item.find("..");
    if (dots == std::string_view::npos) {
      out.push_back(parse_u64(item));
    } else {
      const std::uint64_t lo = parse_u64(item.substr(0, dots));
      const std::uint64_t hi = parse_u64(item.substr(dots + 2));
      if (hi < lo) throw std::invalid_argument("empty seed range: '" + std::string(item) + "'");
      if (hi - lo >= 1'000'000) throw std::invalid_argument("seed range too large");
      for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
    }
    start = comma + 1;
  }
  return out;
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::pdr: return "pdr";
    case Metric::eed: return "eed";
    case Metric::ro: return "ro";
    case Metric::ec: return "ec";
    case Metric::hc: return "hc";
  }
  return "unknown";
}

std::optional<double> RunRecord::metric(Metric m) const {
  switch (m) {
    case Metric::pdr: return pdr_pct;
    case Metric::eed: return eed_s;
    case Metric::ro: return ro;
    case Metric::ec: return ec_j;
    case Metric::hc: return hc;
  }
  return std::nullopt;
}

std::vector<RunSpec> plan_runs(const SweepPlan& plan) {
  std::vector<RunSpec> out;
  for (double value : plan.grid) {
    const SimConfig cell = apply_parameter(plan.base, plan.scenario, value);
    for (Protocol protocol : plan.protocols) {
      for (std::uint64_t seed : plan.seeds) {
        RunSpec spec;
        spec.protocol = protocol;
        spec.scenario = plan.scenario;
        spec.param_value = value;
        spec.seed = seed;
        spec.config = cell;
        spec.config.rng_seed = seed;
        out.push_back(spec);
      }
    }
  }
  return out;
}

RunOutcome execute_run(const RunSpec& spec, const SimulationOptions& options) {
  Simulation sim(spec.config, spec.protocol, options);
  sim.run();
  RunOutcome out;
  out.report = sim.report();
  out.closure = sim.closure();
  RunRecord& r = out.record;
  r.protocol = spec.protocol;
  r.scenario = spec.scenario;
  r.param_name = std::string(parameter_name(spec.scenario));
  r.param_value = spec.param_value;
  r.seed = spec.seed;
  r.pdr_pct = out.report.pdr;
  r.eed_s = out.report.eed;
  r.ro = out.report.ro;
  r.ec_j = out.report.ec;
  r.hc = out.report.hc;
  r.converged_episode = out.report.converged_episode;
  out.report.episode_rewards.clear();
  out.report.episode_rewards.shrink_to_fit();
  return out;
}

std::vector<RunOutcome> execute_runs(std::span<const RunSpec> specs, unsigned jobs,
                                     const SimulationOptions& options) {
  std::vector<RunOutcome> out(specs.size());
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(specs.size())));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < specs.size() && !failed; i = next++) {
      try {
        out[i] = execute_run(specs[i], options);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<CellStats> aggregate(std::span<const RunRecord> records, Metric metric) {
  std::vector<CellStats> cells;
  std::vector<std::vector<double>> samples;
  for (const auto& r : records) {
    auto it = std::find_if(cells.begin(), cells.end(), [&](const CellStats& c) {
      return c.protocol == r.protocol && c.param_value == r.param_value;
    });
    if (it == cells.end()) {
      cells.push_back({r.protocol, r.param_value, 0, 0.0, 0.0});
      samples.emplace_back();
      it = cells.end() - 1;
    }
    if (const auto v = r.metric(metric)) samples[static_cast<std::size_t>(it - cells.begin())].push_back(*v);
  }
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto& s = samples[k];
    cells[k].n = s.size();
    if (s.empty()) continue;
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    double var = 0.0;
    for (double v : s) var += (v - mean) * (v - mean);
    cells[k].mean = mean;
    cells[k].stddev = s.size() > 1 ? std::sqrt(var / static_cast<double>(s.size() - 1)) : 0.0;
  }
  std::stable_sort(cells.begin(), cells.end(), [](const CellStats& a, const CellStats& b) {
    if (a.protocol != b.protocol) return a.protocol < b.protocol;
    return a.param_value < b.param_value;
  });
  return cells;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: size mismatch");
  if (x.size() < 2) throw std::invalid_argument("spearman: need at least two points");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace qqmr
