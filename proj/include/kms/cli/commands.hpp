#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "kms/cli/config.hpp"
#include "kms/cli/report.hpp"

namespace kms::cli {

enum ExitCode { kExitPass = 0, kExitFail = 1, kExitInvalid = 2 };

struct Options {
  std::optional<std::string> output;
  std::optional<std::string> format;
  std::uint64_t seed = 1;
  std::optional<double> tol_abs;
  std::optional<double> tol_rel;
  bool timing = false;
};

SuiteReport build_suite(const RunConfig& config, const Options& options);

std::vector<Table> npoint_tables(const RunConfig& config);
// Rows plus the number of rows whose limit misses its known value.
std::vector<Table> jump_tables(const RunConfig& config, const Options& options, int& failures);
std::vector<Table> kernel_tables(const RunConfig& config);
std::vector<Table> luttinger_tables(const RunConfig& config);

// Each runs one subcommand, writes its output and returns the exit code. Errors propagate.
int cmd_suite(const RunConfig& config, const Options& options);
int cmd_npoint(const RunConfig& config, const Options& options);
int cmd_jump(const RunConfig& config, const Options& options);
int cmd_kernel(const RunConfig& config, const Options& options);
int cmd_luttinger(const RunConfig& config, const Options& options);

// Maps library errors to exit codes and prints the message to err.
int run_guarded(int (*command)(const RunConfig&, const Options&), const RunConfig& config,
                const Options& options, std::ostream& err);

}  // namespace kms::cli
