// Reading and writing the sectioned key = value configuration format.
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qqmr/config.hpp"

namespace qqmr {

/// Parses INI-style text: "[section]" headers and "key = value" lines, '#'
/// or ';' comments. Keys may also appear before any section header. Unknown
/// sections or keys, malformed values, and failed validation all throw
/// ConfigError naming the key. An ell1 given without ell2 completes ell2 to
/// 1 - ell1 (and vice versa).
SimConfig parse_config_text(std::string_view text);

/// Reads a file and parses it. Throws ConfigError if it cannot be read.
SimConfig parse_config(const std::filesystem::path& path);

/// Every parameter with its current value, grouped by section, in a form
/// parse_config_text reads back to an identical SimConfig.
std::string to_config_text(const SimConfig& config);

/// Sets one parameter by bare name ("alpha") or "section.name". Does not
/// validate the whole config. Throws ConfigError for an unknown key or a bad
/// value.
void apply_override(SimConfig& config, std::string_view key, std::string_view value);

/// "section.name" for every known parameter.
std::vector<std::string> config_keys();

}  // namespace qqmr
