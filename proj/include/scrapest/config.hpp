#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "scrapest/synth.hpp"

namespace scrapest {

/// Configuration problem; message names the offending file/line/key.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parsed `key = value` file ('#' comments, blank lines ignored).
struct KeyValueFile {
  std::map<std::string, std::string> values;
  std::map<std::string, int> lines;  // key -> line number, for diagnostics
  std::string origin;                // file name or label, for diagnostics
};

KeyValueFile parse_key_value_file(const std::filesystem::path& path);
KeyValueFile parse_key_value_text(const std::string& text,
                                  const std::string& origin);

/// Builds a scenario from a parsed config; every key has a default, so an
/// empty file yields the sparse-matrix zero-noise baseline scenario.
/// Unknown keys and out-of-range values raise ConfigError.
ScenarioConfig scenario_from_config(const KeyValueFile& file);

/// The effective configuration as key-value pairs (defaults filled in).
std::map<std::string, std::string> config_echo(const ScenarioConfig& config);

/// One-line-per-key schema description for --help and the README.
std::string config_schema_help();

}  // namespace scrapest
