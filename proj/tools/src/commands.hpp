#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include <hjfb/check_report.hpp>

#include "config.hpp"

namespace hjfb::cli {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kConfigError = 2;
inline constexpr int kNotConverged = 3;
inline constexpr int kNonFinite = 4;
}  // namespace exit_code

nlohmann::json to_json(const CheckReport& r);

/// Each command writes its files into cfg.output_directory and returns the exit
/// code; progress and warnings go to `log`. Configuration problems surface as
/// ConfigError (or hjfb::Error raised while building the problem).
int cmd_solve(const RunConfig& cfg, std::ostream& log);
int cmd_two_phase(const RunConfig& cfg, std::ostream& log);
int cmd_regularity(const RunConfig& cfg, const std::optional<std::string>& solution_path,
                   std::ostream& log);
int cmd_verify(const RunConfig& cfg, std::ostream& log);

/// Loads the config, applies overrides, dispatches on `command` and maps
/// configuration errors to exit code 2.
int run_command(const std::string& command, const std::string& config_path, const Overrides& overrides,
                const std::optional<std::string>& solution_path, std::ostream& log);

}  // namespace hjfb::cli
