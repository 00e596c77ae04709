#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace ewhi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct RunOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> output;  // overrides output_dir
  bool quiet = false;
};

/// Runs every seed of a config. Each seed writes history.csv, front.csv,
/// config.echo and diagnostics.jsonl into <output>/seed-<seed>.
int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);

struct PlotOptions {
  std::filesystem::path run_dir;  // a seed directory, or a run root holding seed-* directories
  std::size_t nx = 151;
  std::size_t ny = 61;
};

/// Writes scatter.csv and weight_contours.csv next to history.csv.
int cmd_plotdata(const PlotOptions& options, std::ostream& out, std::ostream& err);

/// Self-verification against the reference oracles; `full` adds the BNH preference study.
int cmd_verify(bool full, std::ostream& out);

}  // namespace ewhi::cli
