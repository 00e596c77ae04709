#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Expected weighted hypervolume improvement optimizer", "ewhi"};
  app.set_version_flag("--version", "ewhi 0.1.0");
  app.require_subcommand(1);

  ewhi::cli::RunOptions run;
  std::string output;
  auto* run_cmd = app.add_subcommand("run", "Run the optimizer for every seed of a config file");
  run_cmd->add_option("config", run.config, "Config file (key = value lines)")->required();
  run_cmd->add_option("-o,--output", output, "Output root; overrides output_dir and EWHI_OUTPUT_ROOT");
  run_cmd->add_flag("-q,--quiet", run.quiet, "No per-iteration progress");

  ewhi::cli::PlotOptions plot;
  auto* plot_cmd = app.add_subcommand("plotdata", "Write scatter.csv and weight_contours.csv for a finished run");
  plot_cmd->add_option("run_dir", plot.run_dir, "Seed directory, or a run root with seed-* directories")->required();
  plot_cmd->add_option("--nx", plot.nx, "Contour grid nodes along f1")->check(CLI::Range(2, 100000));
  plot_cmd->add_option("--ny", plot.ny, "Contour grid nodes along f2")->check(CLI::Range(2, 100000));

  bool full = false;
  auto* verify_cmd = app.add_subcommand("verify", "Check the estimators against the reference oracles");
  verify_cmd->add_flag("--full", full, "Also run the BNH preference study (several minutes)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return ewhi::cli::kExitUsage;
  }

  if (*run_cmd) {
    if (!output.empty()) run.output = output;
    return ewhi::cli::cmd_run(run, std::cout, std::cerr);
  }
  if (*plot_cmd) return ewhi::cli::cmd_plotdata(plot, std::cout, std::cerr);
  return ewhi::cli::cmd_verify(full, std::cout);
}
