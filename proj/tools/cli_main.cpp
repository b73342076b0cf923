#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "prfopt/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"prfopt: seeded discrete phase-selection experiments"};
  app.require_subcommand(1);

  std::string spec_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> realizations;
  std::optional<std::string> out;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("spec", spec_path, "experiment spec file (JSON)")
        ->required();
    cmd->add_option("--seed", seed, "master seed override");
    cmd->add_option("--realizations", realizations,
                    "realization count override");
    cmd->add_option("--out", out, "output base path override");
  };

  CLI::App* run =
      app.add_subcommand("run", "run an experiment and write CSV + sidecar");
  add_common(run);
  CLI::App* bench =
      app.add_subcommand("bench", "time isolated solver iterations");
  add_common(bench);

  CLI11_PARSE(app, argc, argv);

  prf::CliOverrides overrides;
  overrides.seed = seed;
  overrides.realizations = realizations;
  overrides.out = out;
  const std::string command = run->parsed() ? "run" : "bench";
  try {
    return prf::run_cli(command, spec_path, overrides);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
