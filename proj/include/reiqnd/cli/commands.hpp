#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "reiqnd/cli/config.hpp"

namespace reiqnd::cli {

/// What a subcommand produced. `csv` is absent for report-only commands.
struct CommandOutput {
  std::optional<std::string> csv;
  nlohmann::ordered_json report;
  OutputFormat preferred = OutputFormat::json;
};

CommandOutput cmd_derive(const RunConfig& cfg);
CommandOutput cmd_spectrum(const RunConfig& cfg);
CommandOutput cmd_dynamics(const RunConfig& cfg);
CommandOutput cmd_protocol(const RunConfig& cfg);
CommandOutput cmd_readout(const RunConfig& cfg);
CommandOutput cmd_optimize(const RunConfig& cfg);
CommandOutput cmd_audit(const RunConfig& cfg);

std::vector<std::string> command_names();
CommandOutput run_command(const std::string& name, const RunConfig& cfg);

/// Renders the artifact selected by cfg.format (else the command's preferred
/// one). JSON reports gain a trailing `generated_at` field unless timestamps
/// are disabled.
std::string render(const CommandOutput& output, const RunConfig& cfg);

/// Writes `text` to cfg.out, or to `fallback` when no path is set. IoError on
/// failure.
void write_output(const std::string& text, const RunConfig& cfg, std::ostream& fallback);

/// Full command-line entry point. Returns the process exit code: 0 success,
/// 2 invalid input, 3 numerical integrity, 4 I/O.
int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace reiqnd::cli
