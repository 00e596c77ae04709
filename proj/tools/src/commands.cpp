#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "config.hpp"
#include "ewhi/errors.hpp"
#include "ewhi/optimizer.hpp"
#include "ewhi/verify.hpp"
#include "numbers.hpp"

namespace ewhi::cli {

namespace fs = std::filesystem;

namespace {

std::string format_seconds(double s) {
  std::ostringstream os;
  os.precision(3);
  os << s << " s";
  return os.str();
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  return f;
}

std::string history_header(const Problem& p) {
  std::string h = "iteration";
  for (std::size_t i = 1; i <= p.dimension; ++i) h += ",x" + std::to_string(i);
  for (std::size_t i = 1; i <= p.num_objectives; ++i) h += ",f" + std::to_string(i);
  for (std::size_t i = 1; i <= p.num_constraints; ++i) h += ",g" + std::to_string(i);
  return h + ",feasible,selected_ewhi,ewhi_variance,z_estimate,delta_sq";
}

std::string history_row(const Observation& o) {
  std::string row = std::to_string(o.iteration);
  for (Eigen::Index i = 0; i < o.x.size(); ++i) row += "," + format_number(o.x[i]);
  for (double v : o.evaluation.objectives) row += "," + format_number(v);
  for (double v : o.evaluation.constraints) row += "," + format_number(v);
  row += o.evaluation.feasible() ? ",1" : ",0";
  for (double v : {o.selected_ewhi, o.ewhi_variance, o.z_estimate, o.delta_sq}) row += "," + format_number(v);
  return row;
}

void write_front(const fs::path& path, const Problem& problem, const std::vector<Observation>& history) {
  auto f = open_output(path);
  f << "row";
  for (std::size_t i = 1; i <= problem.dimension; ++i) f << ",x" << i;
  for (std::size_t i = 1; i <= problem.num_objectives; ++i) f << ",f" << i;
  f << "\n";
  if (history.empty()) return;
  const ParetoState front = feasible_front(history, problem.num_objectives);
  for (const auto& y : front.front()) {
    for (std::size_t r = 0; r < history.size(); ++r) {
      const auto& o = history[r];
      if (!o.evaluation.feasible() || !std::ranges::equal(o.evaluation.objectives, y.values())) continue;
      f << r;
      for (Eigen::Index i = 0; i < o.x.size(); ++i) f << "," << format_number(o.x[i]);
      for (double v : o.evaluation.objectives) f << "," << format_number(v);
      f << "\n";
      break;
    }
  }
}

nlohmann::ordered_json diagnostics_json(const IterationDiagnostics& d) {
  nlohmann::ordered_json j;
  j["iteration"] = d.iteration;
  j["observations"] = d.num_observations;
  j["front_size"] = d.front_size;
  j["smc_stages"] = d.smc_stages;
  j["z_estimate"] = d.z_estimate;
  j["delta_sq"] = d.delta_sq;
  j["selected_index"] = d.selected_index;
  j["selected_ewhi"] = d.acquisition;
  j["ewhi_variance"] = d.variance;
  j["feasibility"] = d.feasibility;
  j["fallback"] = d.fallback;
  if (!d.note.empty()) j["note"] = d.note;
  return j;
}

int run_seed(const RunConfig& config, std::uint64_t seed, const fs::path& dir, std::ostream& out, std::ostream& err,
             bool quiet) {
  fs::create_directories(dir);
  {
    auto echo_file = open_output(dir / "config.echo");
    echo_file << echo(config, seed);
  }
  const Problem problem = config.make_problem();
  OptimizationRun state(problem, config.make_weight(), config.optimizer_settings(seed));

  auto history = open_output(dir / "history.csv");
  auto diagnostics = open_output(dir / "diagnostics.jsonl");
  history << history_header(problem) << "\n" << std::flush;

  RunObserver observer;
  observer.on_observation = [&](const Observation& o) { history << history_row(o) << "\n" << std::flush; };
  observer.on_iteration = [&](const IterationDiagnostics& d) {
    diagnostics << diagnostics_json(d).dump() << "\n" << std::flush;
    if (!quiet) {
      out << "seed " << seed << " iteration " << d.iteration << "/" << config.n_iterations << ": ewhi "
          << format_number(d.acquisition) << ", front size " << d.front_size << "\n";
    }
  };

  int code = kExitOk;
  try {
    execute(state, observer);
  } catch (const std::exception& e) {
    err << "error: seed " << seed << ": " << e.what() << "\n";
    nlohmann::ordered_json j;
    j["error"] = e.what();
    j["observations"] = state.history.size();
    diagnostics << j.dump() << "\n" << std::flush;
    code = kExitFailure;
  }
  write_front(dir / "front.csv", problem, state.history);
  return code;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::ptrdiff_t column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : it - header.begin();
  }
};

Table read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("'" + path.string() + "' is empty");
  t.header = split(line, ',');
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != t.header.size()) throw std::runtime_error("ragged row in '" + path.string() + "'");
    t.rows.push_back(std::move(fields));
  }
  return t;
}

double cell(const std::string& text) {
  const auto v = parse_number(text);
  if (!v) throw std::runtime_error("bad number '" + text + "'");
  return *v;
}

int plot_one(const fs::path& dir, const PlotOptions& options, std::ostream& out) {
  const RunConfig config = load_config(dir / "config.echo");
  const Table history = read_csv(dir / "history.csv");

  std::vector<std::ptrdiff_t> f_cols;
  for (std::size_t i = 1;; ++i) {
    const auto c = history.column("f" + std::to_string(i));
    if (c < 0) break;
    f_cols.push_back(c);
  }
  const auto feasible_col = history.column("feasible");
  const auto iteration_col = history.column("iteration");
  if (f_cols.empty() || feasible_col < 0 || iteration_col < 0) {
    throw std::runtime_error("history.csv lacks the iteration, f or feasible columns");
  }

  std::vector<std::vector<double>> ys;
  std::vector<bool> feasible;
  for (const auto& row : history.rows) {
    std::vector<double> y;
    for (auto c : f_cols) y.push_back(cell(row[static_cast<std::size_t>(c)]));
    ys.push_back(std::move(y));
    feasible.push_back(row[static_cast<std::size_t>(feasible_col)] == "1");
  }

  {
    auto f = open_output(dir / "scatter.csv");
    f << "iteration";
    for (std::size_t i = 1; i <= f_cols.size(); ++i) f << ",f" << i;
    f << ",feasible,nondominated,initial\n";
    for (std::size_t r = 0; r < ys.size(); ++r) {
      bool nondominated = feasible[r];
      for (std::size_t s = 0; s < ys.size() && nondominated; ++s) {
        if (s != r && feasible[s] && dominates(ys[s], ys[r])) nondominated = false;
      }
      const auto& iteration = history.rows[r][static_cast<std::size_t>(iteration_col)];
      f << iteration;
      for (double v : ys[r]) f << "," << format_number(v);
      f << "," << (feasible[r] ? 1 : 0) << "," << (nondominated ? 1 : 0) << "," << (iteration == "0" ? 1 : 0) << "\n";
    }
  }

  if (f_cols.size() != 2) {
    out << dir.string() << ": scatter.csv written; weight contours need two objectives\n";
    return kExitOk;
  }
  const WeightFunction w = config.make_weight();
  auto f = open_output(dir / "weight_contours.csv");
  f << "y1,y2,omega\n";
  constexpr double kY1Max = 150.0, kY2Max = 60.0;
  for (std::size_t j = 0; j < options.ny; ++j) {
    const double y2 = options.ny > 1 ? kY2Max * static_cast<double>(j) / static_cast<double>(options.ny - 1) : 0.0;
    for (std::size_t i = 0; i < options.nx; ++i) {
      const double y1 = options.nx > 1 ? kY1Max * static_cast<double>(i) / static_cast<double>(options.nx - 1) : 0.0;
      const std::vector<double> y{y1, y2};
      f << format_number(y1) << "," << format_number(y2) << "," << format_number(w(y)) << "\n";
    }
  }
  out << dir.string() << ": scatter.csv and weight_contours.csv written\n";
  return kExitOk;
}

}  // namespace

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = load_config(options.config);
  } catch (const ConfigError& e) {
    err << options.config.string() << ": " << e.what() << "\n";
    return kExitUsage;
  }
  const fs::path root = options.output ? *options.output : output_root(config, options.config);
  for (const auto seed : config.seeds) {
    const fs::path dir = root / ("seed-" + std::to_string(seed));
    int code = kExitOk;
    try {
      code = run_seed(config, seed, dir, out, err, options.quiet);
    } catch (const std::exception& e) {
      err << "error: seed " << seed << ": " << e.what() << "\n";
      code = kExitFailure;
    }
    if (code != kExitOk) return code;
    if (!options.quiet) out << "seed " << seed << " done: " << dir.string() << "\n";
  }
  return kExitOk;
}

int cmd_plotdata(const PlotOptions& options, std::ostream& out, std::ostream& err) {
  std::vector<fs::path> dirs;
  if (fs::exists(options.run_dir / "history.csv")) {
    dirs.push_back(options.run_dir);
  } else if (fs::is_directory(options.run_dir)) {
    for (const auto& entry : fs::directory_iterator(options.run_dir)) {
      if (entry.is_directory() && entry.path().filename().string().rfind("seed-", 0) == 0) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
  }
  if (dirs.empty()) {
    err << options.run_dir.string() << ": no history.csv found\n";
    return kExitUsage;
  }
  for (const auto& dir : dirs) {
    if (!fs::exists(dir / "history.csv") || !fs::exists(dir / "config.echo")) {
      err << dir.string() << ": history.csv or config.echo is missing\n";
      return kExitUsage;
    }
    try {
      plot_one(dir, options, out);
    } catch (const ConfigError& e) {
      err << (dir / "config.echo").string() << ": " << e.what() << "\n";
      return kExitUsage;
    } catch (const std::exception& e) {
      err << dir.string() << ": " << e.what() << "\n";
      return kExitFailure;
    }
  }
  return kExitOk;
}

int cmd_verify(bool full, std::ostream& out) {
  bool all = true;
  const auto show = [&](const verify::CheckResult& r, double seconds) {
    out << (r.passed ? "PASS  " : "FAIL  ") << r.name << ": " << r.detail << " (" << format_seconds(seconds) << ")\n"
        << std::flush;
    all = all && r.passed;
  };
  const auto timed = [&](auto&& check) {
    const auto t0 = std::chrono::steady_clock::now();
    const verify::CheckResult r = check();
    show(r, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  };
  timed([] { return verify::oracle_agreement(); });
  timed([] { return verify::ehvi_reduction(); });
  timed([] { return verify::single_candidate_zero_variance(); });
  timed([] { return verify::normalizing_constant(); });
  timed([] { return verify::variance_calibration(); });
  timed([] { return verify::scaling_equivariance(); });
  if (full) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto report = verify::preference_reproduction();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    show(report.exponential_vs_uniform, seconds);
    show(report.mixture_concentration, seconds);
    show(report.exponential_low_f1, seconds);
  }
  return all ? kExitOk : kExitFailure;
}

}  // namespace ewhi::cli
