#pragma once

#include "beamid/config.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace beamid {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericError = 3;

inline constexpr const char* kVersion = "beamid 1.0.0";

/// Flags shared by every subcommand.
struct CommandOptions {
  std::optional<std::filesystem::path> config_path;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> ct_variant;
  std::vector<std::pair<std::string, std::string>> overrides;  // extra key = value pairs
};

/// Loads the config, applies the flags and runs `command` (forward | verify |
/// invert | scenario). Errors are reported on `err` and mapped to exit codes:
/// configuration and input problems 2, numerical failures 3.
int run_command(const std::string& command, const CommandOptions& options, std::ostream& out,
                std::ostream& err);

// The subcommands proper. `config` already carries the flag overrides; they
// throw on error.
int cmd_forward(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_verify(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_invert(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_scenario(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

/// Every key the commands understand.
const std::set<std::string>& known_config_keys();

}  // namespace beamid
