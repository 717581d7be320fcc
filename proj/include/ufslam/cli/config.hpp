#pragma once

// Flat "dotted.key = value" run configuration. Later assignments override
// earlier ones, so a file followed by command-line --set pairs gives
// flags-over-file precedence.

#include "ufslam/cli/experiment.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace ufslam::cli {

/// One key/value pair with its origin for diagnostics ("file:3", "--set").
struct Assignment {
  std::string key;
  std::string value;
  std::string origin;
};

/// Error whose message starts with the offending key.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parses "key = value" lines; '#' starts a comment. Throws ConfigError on
/// malformed lines.
std::vector<Assignment> parse_config_text(const std::string& text, const std::string& origin);
std::vector<Assignment> load_config_file(const std::filesystem::path& path);

/// Parses "key=value" as given to --set.
Assignment parse_override(const std::string& text);

/// Keys understood by apply_config, in documentation order.
const std::vector<std::string>& config_keys();

/// Builds a RunSpec: preset named by `scenario` (if assigned) else
/// `fallback_scenario`, then every assignment in order. Throws ConfigError
/// naming the key for unknown keys and bad values, then validates.
RunSpec build_spec(const std::vector<Assignment>& assignments, const std::string& fallback_scenario = "sim100");

/// Applies one assignment to an existing RunSpec (no validation).
void apply(RunSpec& spec, const Assignment& a);

}  // namespace ufslam::cli
