#include <CLI11.hpp>
#include <iostream>

#include "parisi_cli/cli.hpp"

using namespace parisi::cli;

int main(int argc, char** argv) {
  CLI::App app{"Parisi measures for mixed p-spin and spherical spin glasses"};
  app.require_subcommand(1);

  struct Flags {
    std::string config;
    std::string out;
    std::string csv;
    std::optional<std::uint64_t> seed;
    std::optional<int> max_k;
    std::optional<double> tol;
  } flags;

  for (const auto& [cmd, help] : {std::pair{Command::Solve, "minimize the Parisi functional adaptively"},
                                  std::pair{Command::Gamma, "evaluate Gamma and its derivatives for a measure"},
                                  std::pair{Command::SphericalSolve, "solve or certify a spherical model"},
                                  std::pair{Command::Check, "evaluate structural criteria and certificates"},
                                  std::pair{Command::Export, "evaluate a measure and export its curves"}}) {
    auto* sub = app.add_subcommand(std::string(to_string(cmd)), help);
    sub->add_option("--config", flags.config, "config file path or inline JSON")->required();
    sub->add_option("--out", flags.out, "result JSON path (stdout when omitted)");
    sub->add_option("--csv", flags.csv, "CSV path");
    sub->add_option("--seed", flags.seed, "optimizer seed");
    sub->add_option("--max-k", flags.max_k, "largest k tried by the optimizer");
    sub->add_option("--tol", flags.tol, "certification tolerance");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitParse;
  }
  const auto cmd = command_from_string(app.get_subcommands().front()->get_name());

  RunConfig cfg;
  try {
    auto j = load_config_json(flags.config);
    if (j.is_object()) {
      if (!flags.out.empty()) j["out"] = flags.out;
      if (!flags.csv.empty()) j["csv"] = flags.csv;
      if (flags.seed) j["seed"] = *flags.seed;
      if (flags.max_k) j["max_k"] = *flags.max_k;
      if (flags.tol) j["tol"] = *flags.tol;
    }
    cfg = parse_config_json(j, cmd);
  } catch (const ConfigError& e) {
    std::cerr << "parisi: " << e.what() << "\n";
    return kExitParse;
  }
  return execute(cfg);
}
