#pragma once

// Command implementations behind the command-line front end. Each command
// is a pure function of its configuration and returns a JSON report plus a
// CSV table; nothing here touches the filesystem except write_outputs().

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "curvtomo/config.hpp"
#include "json.hpp"

namespace curvtomo {

enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2 };

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides campaign and oracle seeds
  bool validate = false;
};

struct CommandResult {
  int exit_code = kExitOk;
  nlohmann::json report;
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
  std::vector<std::string> warnings;
  std::string error;
};

const std::vector<std::string>& command_names();

// Never throws for configuration or numerical failures; those land in
// exit_code and error.
CommandResult run_command(const std::string& name, const Config& cfg, const RunOptions& opt = {});

std::string to_csv(const CommandResult& r);
// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

// Writes <dir>/<command>.<format>; returns the path written.
std::string write_outputs(const std::string& command, const CommandResult& r,
                          const std::string& dir, const std::string& format);

}  // namespace curvtomo
