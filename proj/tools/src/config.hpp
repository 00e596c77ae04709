#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ewhi/optimizer.hpp"
#include "ewhi/problems.hpp"
#include "ewhi/weights.hpp"

namespace ewhi::cli {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }  // 0 when not tied to a line

 private:
  std::size_t line_;
};

struct RunConfig {
  std::string problem;  // built-in name or "external"
  std::string problem_command;
  std::size_t problem_dimension = 0;
  std::size_t problem_objectives = 2;
  std::size_t problem_constraints = 0;
  std::vector<double> problem_lower;
  std::vector<double> problem_upper;

  std::string weight = "exponential";  // uniform | exponential | gaussian-mixture
  double weight_scale = 15.0;
  std::size_t weight_objective = 0;
  std::vector<double> weight_lower{0.0, 0.0};
  std::vector<double> weight_upper{150.0, 60.0};
  std::vector<double> weight_mean1{80.0, 20.0};
  std::vector<double> weight_mean2{30.0, 40.0};
  double weight_angle = 0.7853981633974483;
  std::vector<double> weight_scales{20.0, 3.0};

  std::size_t n_init = 10;
  std::size_t n_iterations = 20;
  std::size_t m_x = 1000;
  std::size_t m_y = 1000;
  std::vector<std::uint64_t> seeds{1};
  std::string output_dir;  // empty: derived from the config file name

  int gp_starts = 5;
  double smc_ess_fraction = 0.7;
  double smc_resample_fraction = 0.5;
  int smc_mh_steps = 5;

  OptimizerSettings optimizer_settings(std::uint64_t seed) const;
  Problem make_problem() const;
  WeightFunction make_weight() const;
};

/// Parses `key = value` lines. `#` starts a comment. Lists are whitespace or comma separated.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text of every key; parse_config(echo(c)) reproduces c.
std::string echo(const RunConfig& config, std::uint64_t seed);

/// output_dir when set (relative paths resolve against EWHI_OUTPUT_ROOT when that
/// variable is set), else <EWHI_OUTPUT_ROOT or cwd>/ewhi-runs/<config stem>.
std::filesystem::path output_root(const RunConfig& config, const std::filesystem::path& config_path);

}  // namespace ewhi::cli
