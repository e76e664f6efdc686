#pragma once

// Front end for the mcsel binary. Kept in a library so tests can drive the
// subcommands in-process.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "mcsel/error.hpp"

namespace mcsel::cli {

enum ExitCode : int { kOk = 0, kConfigFailure = 2, kDataFailure = 3, kNumericalFailure = 4 };

struct CliInvocation {
  std::string subcommand;
  std::filesystem::path config_path;
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  std::optional<std::size_t> samples;
  std::optional<std::string> rules;  // comma separated
  std::optional<std::filesystem::path> data_path;
};

int exit_code_for(Errc code) noexcept;

int cmd_select(const CliInvocation& inv, std::ostream& out, std::ostream& err);
int cmd_experiment(const CliInvocation& inv, std::ostream& out, std::ostream& err);
int cmd_sample_diag(const CliInvocation& inv, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches. Usage errors exit with kConfigFailure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mcsel::cli
