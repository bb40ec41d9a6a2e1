#include "qqmr/config_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <variant>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace qqmr {

namespace {

using Field = std::variant<std::uint32_t SimConfig::*, std::uint64_t SimConfig::*,
                           double SimConfig::*, std::array<double, 3> SimConfig::*>;

struct KeySpec {
  std::string_view section;
  std::string_view name;
  Field field;
};

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table{
      {"network", "node_count", &SimConfig::node_count},
      {"network", "area_side", &SimConfig::area_side},
      {"network", "comm_range", &SimConfig::comm_range},
      {"network", "initial_energy", &SimConfig::initial_energy},
      {"traffic", "buffer_capacity", &SimConfig::buffer_capacity},
      {"traffic", "packet_size", &SimConfig::packet_size},
      {"traffic", "send_rate", &SimConfig::send_rate},
      {"traffic", "traffic_mix", &SimConfig::traffic_mix},
      {"traffic", "sim_duration", &SimConfig::sim_duration},
      {"traffic", "warmup", &SimConfig::warmup},
      {"traffic", "rng_seed", &SimConfig::rng_seed},
      {"learning", "alpha", &SimConfig::alpha},
      {"learning", "gamma", &SimConfig::gamma},
      {"learning", "epsilon_start", &SimConfig::epsilon_start},
      {"learning", "epsilon_decay", &SimConfig::epsilon_decay},
      {"learning", "epsilon_floor", &SimConfig::epsilon_floor},
      {"learning", "membership_threshold", &SimConfig::membership_threshold},
      {"learning", "max_hops", &SimConfig::max_hops},
      {"learning", "pretrain_episodes", &SimConfig::pretrain_episodes},
      {"hello", "hello_interval", &SimConfig::hello_interval},
      {"hello", "hello_expiry_factor", &SimConfig::hello_expiry_factor},
      {"hello", "hello_bytes", &SimConfig::hello_bytes},
      {"queues", "queue_update_interval", &SimConfig::queue_update_interval},
      {"queues", "ell1", &SimConfig::ell1},
      {"queues", "ell2", &SimConfig::ell2},
      {"queues", "min_queue_share", &SimConfig::min_queue_share},
      {"queues", "max_queue_share", &SimConfig::max_queue_share},
      {"queues", "rate_smoothing", &SimConfig::rate_smoothing},
      {"energy", "path_loss_exponent", &SimConfig::path_loss_exponent},
      {"energy", "e_elec", &SimConfig::e_elec},
      {"energy", "eps_amp", &SimConfig::eps_amp},
      {"channel", "bit_rate", &SimConfig::bit_rate},
      {"channel", "per_bit_error_prob", &SimConfig::per_bit_error_prob},
      {"channel", "collision_kappa", &SimConfig::collision_kappa},
      {"channel", "collision_cap", &SimConfig::collision_cap},
      {"channel", "capture_exponent", &SimConfig::capture_exponent},
      {"channel", "contention_slot", &SimConfig::contention_slot},
      {"channel", "rts_kappa", &SimConfig::rts_kappa},
      {"channel", "ack_timeout", &SimConfig::ack_timeout},
      {"channel", "ack_turnaround", &SimConfig::ack_turnaround},
      {"channel", "ack_loss_prob", &SimConfig::ack_loss_prob},
      {"channel", "ack_bytes", &SimConfig::ack_bytes},
      {"channel", "rts_bytes", &SimConfig::rts_bytes},
      {"channel", "cts_bytes", &SimConfig::cts_bytes},
      {"clustering", "fuzziness", &SimConfig::fuzziness},
      {"clustering", "max_iter", &SimConfig::max_iter},
      {"clustering", "tol", &SimConfig::tol},
      {"clustering", "recluster_interval", &SimConfig::recluster_interval},
      {"clustering", "learn_min", &SimConfig::learn_min},
      {"clustering", "learn_max", &SimConfig::learn_max},
  };
  return table;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw ConfigError(std::string(key), "malformed value '" + std::string(text) + "'");
  }
  return value;
}

void assign(SimConfig& config, const KeySpec& spec, std::string_view value) {
  const std::string key = fmt::format("{}.{}", spec.section, spec.name);
  std::visit(
      [&](auto member) {
        using T = std::remove_cvref_t<decltype(config.*member)>;
        if constexpr (std::is_same_v<T, std::array<double, 3>>) {
          std::array<double, 3> mix{};
          std::size_t k = 0;
          std::size_t start = 0;
          for (;;) {
            const auto comma = value.find(',', start);
            if (k == mix.size()) throw ConfigError(key, "expected three comma-separated values");
            mix[k++] = parse_number<double>(key, value.substr(start, comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
          }
          if (k != mix.size()) throw ConfigError(key, "expected three comma-separated values");
          config.*member = mix;
        } else {
          config.*member = parse_number<T>(key, value);
        }
      },
      spec.field);
}

std::string render(const SimConfig& config, const KeySpec& spec) {
  return std::visit(
      [&](auto member) -> std::string {
        using T = std::remove_cvref_t<decltype(config.*member)>;
        const auto& v = config.*member;
        if constexpr (std::is_same_v<T, std::array<double, 3>>) {
          return fmt::format("{:.17g}, {:.17g}, {:.17g}", v[0], v[1], v[2]);
        } else if constexpr (std::is_floating_point_v<T>) {
          return fmt::format("{:.17g}", v);
        } else {
          return std::to_string(v);
        }
      },
      spec.field);
}

const KeySpec& find_key(std::string_view key) {
  const auto& table = key_table();
  const auto dot = key.find('.');
  if (dot != std::string_view::npos) {
    const auto section = key.substr(0, dot);
    const auto name = key.substr(dot + 1);
    for (const auto& spec : table) {
      if (spec.section == section && spec.name == name) return spec;
    }
  } else {
    for (const auto& spec : table) {
      if (spec.name == key) return spec;
    }
  }
  throw ConfigError(std::string(key), "unknown configuration key");
}

}  // namespace

SimConfig parse_config_text(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("line {}", e.line()), e.message());
  }

  SimConfig config;
  bool ell1_set = false;
  bool ell2_set = false;
  auto apply = [&](const KeySpec& spec, const std::string& value) {
    assign(config, spec, value);
    ell1_set |= spec.name == "ell1";
    ell2_set |= spec.name == "ell2";
  };

  const auto& table = key_table();
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      apply(find_key(name), node.data());
      continue;
    }
    const bool known_section = std::any_of(table.begin(), table.end(),
                                           [&](const KeySpec& s) { return s.section == name; });
    if (!known_section) throw ConfigError(name, "unknown configuration section");
    for (const auto& [key, leaf] : node) {
      if (!leaf.empty()) throw ConfigError(name + "." + key, "nested values are not supported");
      apply(find_key(name + "." + key), leaf.data());
    }
  }
  if (ell1_set && !ell2_set) config.ell2 = 1.0 - config.ell1;
  if (ell2_set && !ell1_set) config.ell1 = 1.0 - config.ell2;
  config.validate();
  return config;
}

SimConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot read configuration file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::string to_config_text(const SimConfig& config) {
  std::string out;
  std::string_view section;
  for (const auto& spec : key_table()) {
    if (spec.section != section) {
      if (!section.empty()) out += '\n';
      section = spec.section;
      out += fmt::format("[{}]\n", section);
    }
    out += fmt::format("{} = {}\n", spec.name, render(config, spec));
  }
  return out;
}

void apply_override(SimConfig& config, std::string_view key, std::string_view value) {
  assign(config, find_key(key), value);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& spec : key_table()) out.push_back(fmt::format("{}.{}", spec.section, spec.name));
  return out;
}

}  // namespace qqmr
