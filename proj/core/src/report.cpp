#include "qqmr/report.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <stdexcept>
#include <system_error>

#include <fmt/format.h>
#include "json.hpp"

namespace qqmr {

using nlohmann::json;

std::string format_number(double value) { return fmt::format("{:.17g}", value); }

namespace {

std::string optional_field(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

[[noreturn]] void csv_error(std::size_t line, const std::string& msg) {
  throw std::runtime_error(fmt::format("csv line {}: {}", line, msg));
}

double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc{} || ptr != end) {
    csv_error(line, "bad number '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t parse_uint(std::string_view s, std::size_t line) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc{} || ptr != end) {
    csv_error(line, "bad integer '" + std::string(s) + "'");
  }
  return v;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json record_to_json(const RunRecord& r) {
  json j;
  j["protocol"] = std::string(to_string(r.protocol));
  j["scenario"] = std::string(to_string(r.scenario));
  j["param_name"] = r.param_name;
  j["param_value"] = r.param_value;
  j["seed"] = r.seed;
  j["pdr_pct"] = r.pdr_pct;
  j["eed_s"] = optional_json(r.eed_s);
  j["ro"] = r.ro;
  j["ec_j"] = r.ec_j;
  j["hc"] = optional_json(r.hc);
  j["converged_episode"] = r.converged_episode ? json(*r.converged_episode) : json(nullptr);
  return j;
}

json manifest_json(const RunManifest& m) {
  return json{{"tool_version", m.tool_version}, {"command", m.command},
              {"scenario", m.scenario},         {"protocols", m.protocols},
              {"grid", m.grid},                 {"seeds", m.seeds},
              {"config", m.config_text},        {"started_at", m.started_at},
              {"finished_at", m.finished_at},   {"outputs", m.outputs}};
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

std::string to_csv(std::span<const RunRecord> records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", to_string(r.protocol),
                       to_string(r.scenario), r.param_name, format_number(r.param_value), r.seed,
                       format_number(r.pdr_pct), optional_field(r.eed_s), format_number(r.ro),
                       format_number(r.ec_j), optional_field(r.hc),
                       r.converged_episode ? std::to_string(*r.converged_episode) : "");
  }
  return out;
}

std::vector<RunRecord> parse_csv(std::string_view text) {
  std::vector<RunRecord> out;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kCsvHeader) csv_error(line_no, "unexpected header");
      header_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 11) csv_error(line_no, fmt::format("expected 11 fields, got {}", f.size()));
    RunRecord r;
    const auto protocol = parse_protocol(f[0]);
    if (!protocol) csv_error(line_no, "unknown protocol '" + std::string(f[0]) + "'");
    const auto scenario = parse_scenario(f[1]);
    if (!scenario) csv_error(line_no, "unknown scenario '" + std::string(f[1]) + "'");
    r.protocol = *protocol;
    r.scenario = *scenario;
    r.param_name = std::string(f[2]);
    r.param_value = parse_double(f[3], line_no);
    r.seed = parse_uint(f[4], line_no);
    r.pdr_pct = parse_double(f[5], line_no);
    if (!f[6].empty()) r.eed_s = parse_double(f[6], line_no);
    r.ro = parse_double(f[7], line_no);
    r.ec_j = parse_double(f[8], line_no);
    if (!f[9].empty()) r.hc = parse_double(f[9], line_no);
    if (!f[10].empty()) r.converged_episode = parse_uint(f[10], line_no);
    out.push_back(std::move(r));
  }
  if (!header_seen) csv_error(line_no, "missing header");
  return out;
}

std::string manifest_to_json(const RunManifest& manifest) {
  return manifest_json(manifest).dump(2) + "\n";
}

RunManifest parse_manifest(std::string_view json_text) {
  const json j = json::parse(json_text);
  RunManifest m;
  m.tool_version = j.at("tool_version").get<std::string>();
  m.command = j.at("command").get<std::string>();
  m.scenario = j.at("scenario").get<std::string>();
  m.protocols = j.at("protocols").get<std::vector<std::string>>();
  m.grid = j.at("grid").get<std::vector<double>>();
  m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  m.config_text = j.at("config").get<std::string>();
  m.started_at = j.at("started_at").get<std::string>();
  m.finished_at = j.at("finished_at").get<std::string>();
  m.outputs = j.at("outputs").get<std::vector<std::string>>();
  return m;
}

std::string to_json(std::span<const RunRecord> records, const RunManifest& manifest) {
  json rows = json::array();
  for (const auto& r : records) rows.push_back(record_to_json(r));
  json doc{{"records", std::move(rows)}, {"manifest", manifest_json(manifest)}};
  return doc.dump(2) + "\n";
}

std::vector<PlotFile> plot_data(std::span<const RunRecord> records) {
  std::map<Scenario, std::vector<RunRecord>> by_scenario;
  for (const auto& r : records) by_scenario[r.scenario].push_back(r);
  std::vector<PlotFile> out;
  for (const auto& [scenario, rows] : by_scenario) {
    for (Metric m : {Metric::pdr, Metric::eed, Metric::ro, Metric::ec, Metric::hc}) {
      PlotFile file;
      file.name = fmt::format("{}_{}.dat", to_string(scenario), to_string(m));
      file.content = fmt::format("# protocol {} mean stddev n\n", parameter_name(scenario));
      for (const auto& c : aggregate(rows, m)) {
        file.content += fmt::format("{} {} {} {} {}\n", to_string(c.protocol),
                                    format_number(c.param_value),
                                    c.n ? format_number(c.mean) : "nan",
                                    c.n ? format_number(c.stddev) : "nan", c.n);
      }
      out.push_back(std::move(file));
    }
  }
  return out;
}

std::optional<OutputFormat> parse_output_format(std::string_view text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  if (text == "plotdata") return OutputFormat::plotdata;
  if (text == "all") return OutputFormat::all;
  return std::nullopt;
}

std::vector<std::filesystem::path> emit_results(std::span<const RunRecord> records,
                                                RunManifest manifest, OutputFormat format,
                                                const std::filesystem::path& dir) {
  if (records.empty()) throw std::invalid_argument("no records to write");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

  std::vector<std::pair<std::string, std::string>> files;
  const bool all = format == OutputFormat::all;
  if (all || format == OutputFormat::csv) files.emplace_back("results.csv", to_csv(records));
  if (all || format == OutputFormat::plotdata) {
    for (auto& p : plot_data(records)) files.emplace_back(std::move(p.name), std::move(p.content));
  }
  const bool want_json = all || format == OutputFormat::json;
  manifest.outputs.clear();
  for (const auto& f : files) manifest.outputs.push_back(f.first);
  if (want_json) manifest.outputs.emplace_back("results.json");
  manifest.outputs.emplace_back("manifest.json");
  if (want_json) files.emplace_back("results.json", to_json(records, manifest));
  files.emplace_back("manifest.json", manifest_to_json(manifest));

  std::vector<std::filesystem::path> written;
  for (const auto& [name, content] : files) {
    const auto path = dir / name;
    write_file(path, content);
    written.push_back(path);
  }
  return written;
}

}  // namespace qqmr
