#include "config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "external_problem.hpp"
#include "numbers.hpp"

namespace ewhi::cli {

namespace {

using Setter = std::function<void(RunConfig&, const std::string&)>;

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument(what); }

std::vector<std::string> tokens(const std::string& value) {
  std::string spaced = value;
  for (char& c : spaced) c = c == ',' ? ' ' : c;
  return split_whitespace(spaced);
}

double real(const std::string& value) {
  const auto v = parse_number(value);
  if (!v || !std::isfinite(*v)) bad("expected a finite number, got '" + value + "'");
  return *v;
}

std::uint64_t integer(const std::string& value) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    bad("expected a non-negative integer, got '" + value + "'");
  }
  return v;
}

std::size_t count(const std::string& value) {
  const auto v = integer(value);
  if (v == 0) bad("must be positive");
  return static_cast<std::size_t>(v);
}

std::vector<double> reals(const std::string& value) {
  std::vector<double> out;
  for (const auto& t : tokens(value)) out.push_back(real(t));
  if (out.empty()) bad("expected a list of numbers");
  return out;
}

std::vector<double> pair(const std::string& value) {
  auto v = reals(value);
  if (v.size() != 2) bad("expected two numbers");
  return v;
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"problem", [](RunConfig& c, const std::string& v) { c.problem = v; }},
      {"problem.command", [](RunConfig& c, const std::string& v) { c.problem_command = v; }},
      {"problem.dimension", [](RunConfig& c, const std::string& v) { c.problem_dimension = count(v); }},
      {"problem.objectives", [](RunConfig& c, const std::string& v) { c.problem_objectives = count(v); }},
      {"problem.constraints",
       [](RunConfig& c, const std::string& v) { c.problem_constraints = static_cast<std::size_t>(integer(v)); }},
      {"problem.lower", [](RunConfig& c, const std::string& v) { c.problem_lower = reals(v); }},
      {"problem.upper", [](RunConfig& c, const std::string& v) { c.problem_upper = reals(v); }},
      {"weight",
       [](RunConfig& c, const std::string& v) {
         if (v != "uniform" && v != "exponential" && v != "gaussian-mixture") {
           bad("unknown weight '" + v + "' (uniform, exponential, gaussian-mixture)");
         }
         c.weight = v;
       }},
      {"weight.scale",
       [](RunConfig& c, const std::string& v) {
         c.weight_scale = real(v);
         if (!(c.weight_scale > 0.0)) bad("must be positive");
       }},
      {"weight.objective", [](RunConfig& c, const std::string& v) { c.weight_objective = static_cast<std::size_t>(integer(v)); }},
      {"weight.lower", [](RunConfig& c, const std::string& v) { c.weight_lower = reals(v); }},
      {"weight.upper", [](RunConfig& c, const std::string& v) { c.weight_upper = reals(v); }},
      {"weight.mean1", [](RunConfig& c, const std::string& v) { c.weight_mean1 = pair(v); }},
      {"weight.mean2", [](RunConfig& c, const std::string& v) { c.weight_mean2 = pair(v); }},
      {"weight.angle", [](RunConfig& c, const std::string& v) { c.weight_angle = real(v); }},
      {"weight.scales",
       [](RunConfig& c, const std::string& v) {
         c.weight_scales = pair(v);
         if (!(c.weight_scales[0] > 0.0 && c.weight_scales[1] > 0.0)) bad("scales must be positive");
       }},
      {"n_init", [](RunConfig& c, const std::string& v) { c.n_init = count(v); }},
      {"n_iterations", [](RunConfig& c, const std::string& v) { c.n_iterations = count(v); }},
      {"m_x", [](RunConfig& c, const std::string& v) { c.m_x = count(v); }},
      {"m_y", [](RunConfig& c, const std::string& v) { c.m_y = count(v); }},
      {"seeds",
       [](RunConfig& c, const std::string& v) {
         c.seeds.clear();
         for (const auto& t : tokens(v)) c.seeds.push_back(integer(t));
         if (c.seeds.empty()) bad("seed list is empty");
       }},
      {"output_dir", [](RunConfig& c, const std::string& v) { c.output_dir = v; }},
      {"gp.starts", [](RunConfig& c, const std::string& v) { c.gp_starts = static_cast<int>(count(v)); }},
      {"smc.ess_fraction",
       [](RunConfig& c, const std::string& v) {
         c.smc_ess_fraction = real(v);
         if (!(c.smc_ess_fraction > 0.0 && c.smc_ess_fraction < 1.0)) bad("must lie in (0, 1)");
       }},
      {"smc.resample_fraction",
       [](RunConfig& c, const std::string& v) {
         c.smc_resample_fraction = real(v);
         if (!(c.smc_resample_fraction >= 0.0 && c.smc_resample_fraction <= 1.0)) bad("must lie in [0, 1]");
       }},
      {"smc.mh_steps", [](RunConfig& c, const std::string& v) { c.smc_mh_steps = static_cast<int>(integer(v)); }},
  };
  return table;
}

void check_box(const std::vector<double>& lower, const std::vector<double>& upper, const std::string& what) {
  if (lower.size() != upper.size()) bad(what + ".lower and " + what + ".upper differ in length");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i])) bad(what + ".lower must be below " + what + ".upper in every coordinate");
  }
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + format_shortest(v[i]);
  return out;
}

}  // namespace

ConfigError::ConfigError(std::size_t line, const std::string& message)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::map<std::string, std::size_t> seen;
  std::istringstream in(text);
  std::string raw;
  for (std::size_t line = 1; std::getline(in, raw); ++line) {
    std::string_view body(raw);
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line, "expected 'key = value'");
    const std::string key(trim(body.substr(0, eq)));
    const std::string value(trim(body.substr(eq + 1)));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(line, "unknown key '" + key + "'");
    if (const auto prev = seen.find(key); prev != seen.end()) {
      throw ConfigError(line, "duplicate key '" + key + "' (first set on line " + std::to_string(prev->second) + ")");
    }
    if (value.empty()) throw ConfigError(line, "missing value for '" + key + "'");
    seen.emplace(key, line);
    try {
      it->second(config, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(line, key + ": " + e.what());
    }
  }

  const auto line_of = [&](const std::string& key) {
    const auto it = seen.find(key);
    return it == seen.end() ? std::size_t{0} : it->second;
  };
  if (config.problem.empty()) throw ConfigError(0, "missing required key 'problem'");
  try {
    if (config.problem == "external") {
      if (config.problem_command.empty()) bad("external problems need problem.command");
      if (config.problem_dimension == 0) bad("external problems need problem.dimension");
      check_box(config.problem_lower, config.problem_upper, "problem");
      if (config.problem_lower.size() != config.problem_dimension) bad("problem bounds must have problem.dimension entries");
    } else {
      (void)builtin_problem(config.problem);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(line_of("problem"), e.what());
  }
  try {
    check_box(config.weight_lower, config.weight_upper, "weight");
    const std::size_t p = config.make_problem().num_objectives;
    if (config.weight_lower.size() != p) bad("weight box must have one entry per objective");
    if (config.weight == "gaussian-mixture" && p != 2) bad("gaussian-mixture weight needs two objectives");
    if (config.weight == "exponential" && config.weight_objective >= p) bad("weight.objective out of range");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(line_of("weight"), e.what());
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot read config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

OptimizerSettings RunConfig::optimizer_settings(std::uint64_t seed) const {
  OptimizerSettings s;
  s.n_init = n_init;
  s.n_iterations = n_iterations;
  s.m_x = m_x;
  s.m_y = m_y;
  s.seed = seed;
  s.gp_starts = gp_starts;
  s.smc.ess_fraction = smc_ess_fraction;
  s.smc.resample_fraction = smc_resample_fraction;
  s.smc.mh_steps = smc_mh_steps;
  return s;
}

Problem RunConfig::make_problem() const {
  if (problem != "external") return builtin_problem(problem);
  return external_problem(problem_command, problem_lower, problem_upper, problem_objectives, problem_constraints);
}

WeightFunction RunConfig::make_weight() const {
  const BoundingBox box{ObjectiveVector(weight_lower), ObjectiveVector(weight_upper)};
  if (weight == "uniform") return uniform_box_weight(box);
  if (weight == "exponential") {
    ExponentialWeightParams params;
    params.scale = weight_scale;
    params.objective = weight_objective;
    params.box = box;
    return exponential_weight(params);
  }
  GaussianMixtureParams params;
  params.means = {{weight_mean1[0], weight_mean1[1]}, {weight_mean2[0], weight_mean2[1]}};
  params.angle = weight_angle;
  params.scales = {weight_scales[0], weight_scales[1]};
  params.box = box;
  return gaussian_mixture_weight(params);
}

std::string echo(const RunConfig& c, std::uint64_t seed) {
  std::ostringstream out;
  out << "problem = " << c.problem << "\n";
  if (c.problem == "external") {
    out << "problem.command = " << c.problem_command << "\n"
        << "problem.dimension = " << c.problem_dimension << "\n"
        << "problem.objectives = " << c.problem_objectives << "\n"
        << "problem.constraints = " << c.problem_constraints << "\n"
        << "problem.lower = " << join(c.problem_lower) << "\n"
        << "problem.upper = " << join(c.problem_upper) << "\n";
  }
  out << "weight = " << c.weight << "\n";
  if (c.weight == "exponential") {
    out << "weight.scale = " << format_shortest(c.weight_scale) << "\n"
        << "weight.objective = " << c.weight_objective << "\n";
  } else if (c.weight == "gaussian-mixture") {
    out << "weight.mean1 = " << join(c.weight_mean1) << "\n"
        << "weight.mean2 = " << join(c.weight_mean2) << "\n"
        << "weight.angle = " << format_shortest(c.weight_angle) << "\n"
        << "weight.scales = " << join(c.weight_scales) << "\n";
  }
  out << "weight.lower = " << join(c.weight_lower) << "\n"
      << "weight.upper = " << join(c.weight_upper) << "\n"
      << "n_init = " << c.n_init << "\n"
      << "n_iterations = " << c.n_iterations << "\n"
      << "m_x = " << c.m_x << "\n"
      << "m_y = " << c.m_y << "\n"
      << "seeds = " << seed << "\n"
      << "gp.starts = " << c.gp_starts << "\n"
      << "smc.ess_fraction = " << format_shortest(c.smc_ess_fraction) << "\n"
      << "smc.resample_fraction = " << format_shortest(c.smc_resample_fraction) << "\n"
      << "smc.mh_steps = " << c.smc_mh_steps << "\n";
  return out.str();
}

std::filesystem::path output_root(const RunConfig& config, const std::filesystem::path& config_path) {
  const char* env = std::getenv("EWHI_OUTPUT_ROOT");
  const std::filesystem::path root = env && *env ? std::filesystem::path(env) : std::filesystem::current_path();
  if (!config.output_dir.empty()) {
    const std::filesystem::path dir(config.output_dir);
    return dir.is_absolute() ? dir : root / dir;
  }
  return root / "ewhi-runs" / config_path.stem();
}

}  // namespace ewhi::cli
