#include "qqmr/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "CLI11.hpp"
#include "qqmr/config_io.hpp"
#include "qqmr/report.hpp"
#include "qqmr/sweep.hpp"
#include "qqmr/wfcm.hpp"

namespace qqmr {

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string scenario = "density";
  std::string protocol = "both";
  std::string seeds = "1";
  std::optional<std::uint32_t> nodes;
  std::optional<double> rate;
  std::optional<double> duration;
  std::string out;
  std::string format = "all";
  unsigned jobs = 1;
  std::string grid;
  std::string manifest;
  std::string trace_dir;
};

struct ClusterArgs {
  std::string config_path;
  std::string input;
  std::string out;
  std::uint64_t seed = 1;
  bool raw = false;
};

// Validation failures that are not configuration errors.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
}

SimConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  SimConfig config = path.empty() ? SimConfig{} : parse_config(path);
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError(item, "override must be key=value");
    apply_override(config, item.substr(0, eq), item.substr(eq + 1));
  }
  config.validate();
  return config;
}

std::vector<Protocol> parse_protocols(const std::string& text) {
  if (text == "both") return {Protocol::qqmr, Protocol::greedy};
  if (const auto p = parse_protocol(text)) return {*p};
  throw UsageError("unknown protocol '" + text + "' (qqmr, greedy or both)");
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw UsageError("bad grid value '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("empty grid");
  return out;
}

void add_common(CLI::App& cmd, CommonArgs& a, bool sweep) {
  cmd.add_option("--config", a.config_path, "Configuration file")->check(CLI::ExistingFile);
  cmd.add_option("--set", a.overrides, "Override one parameter: key=value (repeatable)");
  cmd.add_option("--scenario", a.scenario, "Varied parameter")
      ->check(CLI::IsMember({"density", "rate"}));
  cmd.add_option("--protocol", a.protocol, "qqmr, greedy or both")
      ->check(CLI::IsMember({"qqmr", "greedy", "both"}));
  cmd.add_option("--seeds", a.seeds, "Seeds: 7, 1..10 or 1,4,9");
  cmd.add_option("--nodes", a.nodes, "Number of WBAN users");
  cmd.add_option("--rate", a.rate, "Packets per second per user");
  cmd.add_option("--duration", a.duration, "Simulated seconds");
  cmd.add_option("--out", a.out, "Output directory");
  cmd.add_option("--format", a.format, "csv, json, plotdata or all")
      ->check(CLI::IsMember({"csv", "json", "plotdata", "all"}));
  cmd.add_option("--jobs", a.jobs, "Worker threads")->check(CLI::Range(1u, 256u));
  cmd.add_option("--trace-dir", a.trace_dir, "Write Q-table and membership dumps per run");
  if (sweep) {
    cmd.add_option("--grid", a.grid, "Comma-separated parameter values");
  } else {
    cmd.add_option("--manifest", a.manifest, "Re-run the runs listed in a manifest")
        ->check(CLI::ExistingFile);
  }
}

SweepPlan plan_from_args(const CommonArgs& a, bool sweep, RunManifest& manifest) {
  SweepPlan plan;
  if (!a.manifest.empty()) {
    std::ifstream in(a.manifest, std::ios::binary);
    std::stringstream text;
    text << in.rdbuf();
    RunManifest source;
    try {
      source = parse_manifest(text.str());
    } catch (const std::exception& e) {
      throw UsageError(std::string("unreadable manifest: ") + e.what());
    }
    plan.base = parse_config_text(source.config_text);
    const auto scenario = parse_scenario(source.scenario);
    if (!scenario) throw UsageError("manifest has unknown scenario '" + source.scenario + "'");
    plan.scenario = *scenario;
    for (const auto& p : source.protocols) {
      const auto protocol = parse_protocol(p);
      if (!protocol) throw UsageError("manifest has unknown protocol '" + p + "'");
      plan.protocols.push_back(*protocol);
    }
    plan.grid = source.grid;
    plan.seeds = source.seeds;
    manifest.command = source.command;
  } else {
    plan.base = load_config(a.config_path, a.overrides);
    if (a.nodes) plan.base.node_count = *a.nodes;
    if (a.rate) plan.base.send_rate = *a.rate;
    if (a.duration) plan.base.sim_duration = *a.duration;
    plan.base.validate();
    plan.scenario = *parse_scenario(a.scenario);
    plan.protocols = parse_protocols(a.protocol);
    try {
      plan.seeds = parse_seeds(a.seeds);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (sweep) {
      plan.grid = a.grid.empty() ? default_grid(plan.scenario) : parse_grid(a.grid);
    } else {
      plan.grid = {plan.scenario == Scenario::density ? static_cast<double>(plan.base.node_count)
                                                      : plan.base.send_rate};
    }
    manifest.command = sweep ? "sweep" : "run";
  }
  manifest.tool_version = QQMR_VERSION;
  manifest.scenario = std::string(to_string(plan.scenario));
  for (Protocol p : plan.protocols) manifest.protocols.emplace_back(to_string(p));
  manifest.grid = plan.grid;
  manifest.seeds = plan.seeds;
  manifest.config_text = to_config_text(plan.base);
  return plan;
}

std::vector<RunOutcome> run_with_traces(std::span<const RunSpec> specs,
                                        const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<RunOutcome> out;
  for (const auto& spec : specs) {
    const std::string stem = fmt::format("{}_{}_{}", to_string(spec.protocol),
                                         format_number(spec.param_value), spec.seed);
    std::ofstream qtables(dir / (stem + "_qtables.csv"));
    std::ofstream clusters(dir / (stem + "_clusters.csv"));
    if (!qtables || !clusters) throw std::runtime_error("cannot write to " + dir.string());
    SimulationOptions options;
    options.qtable_dump = &qtables;
    options.cluster_dump = &clusters;
    out.push_back(execute_run(spec, options));
  }
  return out;
}

int execute(const CommonArgs& a, bool sweep, std::ostream& out, std::ostream& err) {
  RunManifest manifest;
  const SweepPlan plan = plan_from_args(a, sweep, manifest);
  if (a.out.empty()) throw UsageError("--out is required");
  const auto specs = plan_runs(plan);
  manifest.started_at = utc_now();
  const auto outcomes =
      a.trace_dir.empty() ? execute_runs(specs, a.jobs) : run_with_traces(specs, a.trace_dir);
  manifest.finished_at = utc_now();

  std::vector<RunRecord> records;
  std::size_t closure_failures = 0;
  for (const auto& o : outcomes) {
    records.push_back(o.record);
    if (!o.closure.ok()) ++closure_failures;
  }
  const auto files =
      emit_results(records, manifest, *parse_output_format(a.format), std::filesystem::path(a.out));
  out << fmt::format("{} runs, {} files written to {}\n", records.size(), files.size(), a.out);
  if (closure_failures > 0) {
    err << fmt::format("error: accounting or energy closure violated in {} run(s)\n",
                       closure_failures);
    return kExitRuntime;
  }
  return kExitOk;
}

std::vector<FeatureVector> read_features(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::vector<FeatureVector> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::stringstream fields(line);
    std::string cell;
    std::vector<double> values;
    bool numeric = true;
    while (std::getline(fields, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) numeric = false;
      } catch (const std::logic_error&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (rows.empty() && line_no == 1) continue;  // header
      throw UsageError(fmt::format("{}:{}: non-numeric field", path, line_no));
    }
    if (values.size() != kFeatureCount) {
      throw UsageError(fmt::format("{}:{}: expected {} features, got {}", path, line_no,
                                   kFeatureCount, values.size()));
    }
    rows.push_back({values[0], values[1], values[2], values[3]});
  }
  return rows;
}

int cluster(const ClusterArgs& a, std::ostream& out) {
  const SimConfig config = load_config(a.config_path, {});
  auto rows = read_features(a.input);
  if (rows.size() < kClusterCount) {
    throw UsageError(fmt::format("need at least {} rows, got {}", kClusterCount, rows.size()));
  }
  if (!a.raw) rows = normalize_features(rows);
  WfcmParams params;
  params.m = config.fuzziness;
  params.max_iter = config.max_iter;
  params.tol = config.tol;
  params.learn_min = config.learn_min;
  params.learn_max = config.learn_max;
  params.seed = a.seed;
  const ClusterModel model = run_wfcm(rows, params);

  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw std::runtime_error("cannot write " + a.out);
  }
  std::ostream& sink = a.out.empty() ? out : file;
  sink << "row,u_emergency,u_error_sensitive,u_normal,cluster\n";
  for (std::size_t i = 0; i < model.memberships.size(); ++i) {
    const auto& u = model.memberships[i];
    std::size_t best = 0;
    for (std::size_t k = 1; k < u.size(); ++k) {
      if (u[k] > u[best]) best = k;
    }
    sink << fmt::format("{},{},{},{},{}\n", i, format_number(u[0]), format_number(u[1]),
                        format_number(u[2]), to_string(class_at(best)));
  }
  if (!a.out.empty()) {
    out << fmt::format("{} rows clustered in {} iterations ({}), written to {}\n",
                       model.memberships.size(), model.iterations,
                       model.converged ? "converged" : "iteration cap", a.out);
  }
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"QoS-aware multipath routing simulator for inter-WBAN networks", "qqmr"};
  app.set_version_flag("--version", std::string(QQMR_VERSION));
  app.require_subcommand(1);

  CommonArgs run_args;
  CommonArgs sweep_args;
  ClusterArgs cluster_args;
  std::string validate_path;
  std::vector<std::string> validate_overrides;

  auto* run_cmd = app.add_subcommand("run", "Run one scenario cell for each protocol and seed");
  add_common(*run_cmd, run_args, false);
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter grid");
  add_common(*sweep_cmd, sweep_args, true);
  sweep_cmd->get_option("--out")->required();
  auto* cluster_cmd = app.add_subcommand("cluster", "Cluster a feature CSV with WFCM");
  cluster_cmd->add_option("--input", cluster_args.input, "CSV of delay,buffer,error,energy")
      ->required()
      ->check(CLI::ExistingFile);
  cluster_cmd->add_option("--config", cluster_args.config_path, "Configuration file")
      ->check(CLI::ExistingFile);
  cluster_cmd->add_option("--seed", cluster_args.seed, "Initial-center seed");
  cluster_cmd->add_option("--out", cluster_args.out, "Output CSV (default stdout)");
  cluster_cmd->add_flag("--raw", cluster_args.raw, "Skip min-max feature scaling");
  auto* validate_cmd = app.add_subcommand("validate", "Check a configuration file");
  validate_cmd->add_option("--config", validate_path, "Configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  validate_cmd->add_option("--set", validate_overrides, "Override one parameter: key=value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    if (app.get_subcommands().empty()) {
      err << app.help();
    } else {
      err << app.get_subcommands().front()->help();
    }
    return kExitValidation;
  }

  try {
    if (*run_cmd) return execute(run_args, false, out, err);
    if (*sweep_cmd) return execute(sweep_args, true, out, err);
    if (*cluster_cmd) return cluster(cluster_args, out);
    load_config(validate_path, validate_overrides);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace qqmr
