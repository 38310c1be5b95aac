#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "kms/cli/commands.hpp"
#include "kms/error.hpp"

using namespace kms::cli;

int main(int argc, char** argv) {
  CLI::App app{"Thermal anyon correlators: identity suite and tabulations"};
  app.require_subcommand(1);

  std::string config_path;
  Options options;
  std::string format;
  double tol_abs = 0.0, tol_rel = 0.0;

  using Command = int (*)(const RunConfig&, const Options&);
  const std::map<std::string, std::pair<Command, std::string>> commands = {
      {"suite", {cmd_suite, "Run the invariant battery and write a report"}},
      {"npoint", {cmd_npoint, "Tabulate n-point correlators, product against determinant"}},
      {"jump", {cmd_jump, "Tabulate eps -> 0 limits of the jump integral"}},
      {"kernel", {cmd_kernel, "Tabulate the thermal kernel w(x)"}},
      {"luttinger", {cmd_luttinger, "Tabulate interacting dispersions and kernels"}},
  };
  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.second);
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--output", options.output, "Output file (default stdout)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", options.seed, "Seed for random configurations");
    sub->add_option("--tolerance-abs", tol_abs, "Override absolute tolerances");
    sub->add_option("--tolerance-rel", tol_rel, "Override relative tolerances");
    sub->add_flag("--timing", options.timing, "Record runtimes (reports are then not byte-stable)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitInvalid;
  }

  auto* sub = app.get_subcommands().front();
  if (!format.empty()) options.format = format;
  if (sub->count("--tolerance-abs")) options.tol_abs = tol_abs;
  if (sub->count("--tolerance-rel")) options.tol_rel = tol_rel;
  if ((options.tol_abs && *options.tol_abs < 0.0) || (options.tol_rel && *options.tol_rel < 0.0)) {
    std::cerr << "error: tolerances must be non-negative\n";
    return kExitInvalid;
  }

  RunConfig config;
  if (!config_path.empty()) {
    try {
      config = load_config(config_path);
    } catch (const kms::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitInvalid;
    }
  }
  return run_guarded(commands.at(sub->get_name()).first, config, options, std::cerr);
}
