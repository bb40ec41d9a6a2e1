// Result files: CSV, JSON, plot data and the run manifest.
#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qqmr/sweep.hpp"

namespace qqmr {

inline constexpr std::string_view kCsvHeader =
    "protocol,scenario,param_name,param_value,seed,pdr_pct,eed_s,ro,ec_j,hc,converged_episode";

/// Shortest-exact decimal form ("%.17g"), dot separator.
std::string format_number(double value);

std::string to_csv(std::span<const RunRecord> records);

/// Throws std::runtime_error with a line number on malformed input.
std::vector<RunRecord> parse_csv(std::string_view text);

struct RunManifest {
  std::string tool_version;
  std::string command;   // run | sweep
  std::string scenario;
  std::vector<std::string> protocols;
  std::vector<double> grid;
  std::vector<std::uint64_t> seeds;
  std::string config_text;  // fully resolved configuration
  std::string started_at;   // ISO 8601 UTC
  std::string finished_at;
  std::vector<std::string> outputs;
};

std::string manifest_to_json(const RunManifest& manifest);
RunManifest parse_manifest(std::string_view json_text);

/// {"records": [...], "manifest": {...}}
std::string to_json(std::span<const RunRecord> records, const RunManifest& manifest);

struct PlotFile {
  std::string name;  // e.g. density_pdr.dat
  std::string content;
};

/// One file per metric of the scenario: columns protocol, param_value, mean,
/// stddev, n.
std::vector<PlotFile> plot_data(std::span<const RunRecord> records);

enum class OutputFormat : std::uint8_t { csv, json, plotdata, all };

std::optional<OutputFormat> parse_output_format(std::string_view text);

/// Writes the requested files plus manifest.json into `dir` (created if
/// needed) and returns their paths. Throws std::invalid_argument for empty
/// records and std::runtime_error when a file cannot be written.
std::vector<std::filesystem::path> emit_results(std::span<const RunRecord> records,
                                                RunManifest manifest, OutputFormat format,
                                                const std::filesystem::path& dir);

}  // namespace qqmr
