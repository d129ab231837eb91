#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "freqlab/config.hpp"
#include "freqlab/errors.hpp"
#include "freqlab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"freqlab: a numerical laboratory for Almgren-type frequency functions"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", dump_grid;
  for (const char* name : {"describe", "sweep", "verify", "solve", "doubling"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--out", out_dir, "output directory (default: cwd)");
    sub->add_option("--dump-grid", dump_grid, "write the solved grid to this path");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : freqlab::kExitUsage;
  }

  try {
    auto cfg = freqlab::ExperimentConfig::from_config(
        freqlab::KeyValueConfig::parse_file(config_path));
    return freqlab::run_command(app.get_subcommands().front()->get_name(), cfg, out_dir,
                                dump_grid);
  } catch (const freqlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return freqlab::kExitUsage;
  }
}
