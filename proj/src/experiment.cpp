#include "awflow/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include <fmt/format.h>

#include "awflow/errors.hpp"
#include "json.hpp"

namespace awflow {

namespace fs = std::filesystem;
using nlohmann::json;

bool RunSummary::passed() const {
  if (!error.empty()) return false;
  return std::all_of(monitors.begin(), monitors.end(), [](const MonitorReport& m) { return m.passed; });
}

bool ExperimentResult::all_passed() const {
  return std::all_of(runs.begin(), runs.end(), [](const RunSummary& r) { return r.passed(); });
}

std::vector<Vec> sample_initial_conditions(const Problem& problem, const SamplerSpec& spec,
                                           std::optional<double> level) {
  const ConstraintSet& set = problem.set;
  const ProxInfo info = set.prox_info();
  const double reach = info.alpha > 0.0 ? 0.9 * info.safe_radius : spec.width;
  Rng rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(spec.count));
  constexpr int kMaxAttempts = 10000;
  for (int k = 0; k < spec.count; ++k) {
    Vec xbar;
    int attempt = 0;
    for (; attempt < kMaxAttempts; ++attempt) {
      xbar = set.sample_point(rng);
      if (!level || problem.objective.eval(xbar) <= *level) break;
    }
    if (attempt == kMaxAttempts) {
      throw EmptySublevel("sample_initial_conditions: no point of C with objective value <= " +
                          std::to_string(*level));
    }
    const Vec eta = set.sample_unit_normal(xbar, rng);
    out.push_back(xbar + reach * unit(rng) * eta);
  }
  return out;
}

std::vector<Vec> initial_conditions(const ExperimentConfig& config) {
  if (config.x0) return {*config.x0};
  return sample_initial_conditions(*config.problem, *config.sampler, config.level);
}

std::string trace_csv(const Trajectory& traj, const Problem& problem, int stride) {
  const int n = problem.set.dimension();
  std::string out = "t";
  for (int i = 1; i <= n; ++i) out += fmt::format(",x_{}", i);
  for (int i = 1; i <= n; ++i) out += fmt::format(",xbar_{}", i);
  out += ",phi_xbar,d_C,field_norm,crit_residual,active_sig\n";
  auto row = [&](std::size_t k) {
    const Vec& x = traj.states[k];
    const Vec& xbar = traj.projected[k];
    out += fmt::format("{:.17g}", traj.times[k]);
    for (int i = 0; i < n; ++i) out += fmt::format(",{:.17g}", x(i));
    for (int i = 0; i < n; ++i) out += fmt::format(",{:.17g}", xbar(i));
    const double crit = problem.set.normal_residual(xbar, -problem.objective.grad(xbar));
    out += fmt::format(",{:.17g},{:.17g},{:.17g},{:.17g},{}\n", problem.objective.eval(xbar),
                       (x - xbar).norm(), traj.velocities[k].norm(), crit, traj.active_signature[k]);
  };
  const std::size_t step = static_cast<std::size_t>(std::max(stride, 1));
  for (std::size_t k = 0; k < traj.size(); k += step) row(k);
  if (traj.size() > 0 && (traj.size() - 1) % step != 0) row(traj.size() - 1);
  return out;
}

namespace {

json to_json(const Vec& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json to_json(const MonitorReport& r) {
  return {{"name", r.name},
          {"passed", r.passed},
          {"worst_violation", r.worst_violation},
          {"worst_time", r.worst_time},
          {"tolerance", r.tolerance},
          {"samples_checked", r.samples_checked},
          {"samples_excluded_kink", r.samples_excluded_kink}};
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

Trajectory run_flow(const ExperimentConfig& config, const Vec& x0) {
  if (config.flow == FlowChoice::PgfReference) {
    return pgf_reference(*config.problem, config.problem->set.project(x0), config.dt, config.t_end);
  }
  const FlowKind kind = config.flow == FlowChoice::AntiWindup ? FlowKind::AntiWindup : FlowKind::Penalized;
  IntegrateOptions opt;
  opt.dt = config.dt;
  opt.t_end = config.t_end;
  opt.lyapunov_halving = config.lyapunov_halving;
  return integrate(FlowField(kind, config.K, config.problem), x0, opt);
}

MonitorReport failed_report(const std::string& name) {
  MonitorReport r;
  r.name = name;
  r.passed = false;
  r.worst_violation = std::numeric_limits<double>::max();
  return r;
}

RunSummary run_one(const ExperimentConfig& config, int index, const Vec& x0, double M,
                   const fs::path& dir, bool write_files) {
  const Problem& problem = *config.problem;
  RunSummary s;
  s.index = index;
  s.x0 = x0;
  try {
    s.level = config.level ? *config.level : problem.objective.eval(problem.set.project(x0));
    const Trajectory traj = run_flow(config, x0);
    s.status = std::string(to_string(traj.status));
    s.samples = static_cast<int>(traj.size());
    s.halvings = traj.halvings;
    s.exit_state = traj.exit_state;
    if (traj.size() > 0) {
      s.t_final = traj.times.back();
      s.final_state = traj.states.back();
      s.final_projected = traj.projected.back();
      s.final_criticality =
          problem.set.normal_residual(s.final_projected, -problem.objective.grad(s.final_projected));
      for (std::size_t i = 0; i < traj.size(); ++i) {
        s.max_distance = std::max(s.max_distance, (traj.states[i] - traj.projected[i]).norm());
      }
    }
    for (const std::string& name : config.monitors) {
      if (name == "lyapunov") {
        s.monitors.push_back(lyapunov_monitor(traj, problem));
      } else if (name == "derivative_identity") {
        s.monitors.push_back(derivative_identity_monitor(traj, problem, config.K));
      } else if (name == "tube") {
        s.monitors.push_back(tube_monitor(traj, problem.set, config.K, M, x0));
      } else if (name == "invariance") {
        s.monitors.push_back(invariance_monitor(traj, problem.set, problem.objective, s.level));
      } else if (name == "criticality") {
        try {
          s.monitors.push_back(criticality_monitor(traj, problem));
        } catch (const NotConverged&) {
          s.monitors.push_back(failed_report("criticality"));
        }
      }
    }
    if (write_files) {
      s.trace_file = fmt::format("trace_{:04d}.csv", index);
      write_file(dir / s.trace_file, trace_csv(traj, problem, config.trace_stride));
    }
  } catch (const Error& e) {
    s.status = "Error";
    s.error = e.what();
  }
  return s;
}

}  // namespace

std::string summary_json(const ExperimentConfig& config, const ExperimentResult& result) {
  json runs = json::array();
  for (const RunSummary& r : result.runs) {
    json monitors = json::array();
    for (const auto& m : r.monitors) monitors.push_back(to_json(m));
    json j = {{"index", r.index},
              {"x0", to_json(r.x0)},
              {"level", r.level},
              {"status", r.status},
              {"t_final", r.t_final},
              {"samples", r.samples},
              {"halvings", r.halvings},
              {"max_distance", r.max_distance},
              {"final_criticality", r.final_criticality},
              {"passed", r.passed()},
              {"monitors", monitors}};
    if (r.final_state.size() > 0) {
      j["final_state"] = to_json(r.final_state);
      j["final_projected"] = to_json(r.final_projected);
    }
    if (r.exit_state) j["exit_state"] = to_json(*r.exit_state);
    if (!r.error.empty()) j["error"] = r.error;
    if (!r.trace_file.empty()) j["trace"] = r.trace_file;
    runs.push_back(std::move(j));
  }
  json root = {{"name", result.name},
               {"flow", std::string(to_string(config.flow))},
               {"K", config.K},
               {"dt", config.dt},
               {"t_end", config.t_end},
               {"set", std::string(config.problem->set.kind_name())},
               {"M", result.M},
               {"kstar", result.kstar ? json(*result.kstar) : json(nullptr)},
               {"all_passed", result.all_passed()},
               {"runs", runs}};
  return root.dump(2) + "\n";
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  const Problem& problem = *config.problem;
  const std::vector<Vec> starts = initial_conditions(config);

  double max_level = config.level.value_or(-std::numeric_limits<double>::infinity());
  if (!config.level) {
    for (const Vec& x0 : starts) max_level = std::max(max_level, problem.objective.eval(problem.set.project(x0)));
  }

  ExperimentResult result;
  result.name = config.name;
  result.M = grad_bound(problem.objective, problem.set, max_level, config.grad_bound_samples,
                        config.grad_bound_seed);
  const double alpha = problem.set.prox_info().alpha;
  if (alpha > 0.0) result.kstar = kstar(alpha, result.M);

  const fs::path dir = options.output_dir.empty() ? resolved_output_dir(config) : options.output_dir;
  if (options.write_files) fs::create_directories(dir);

  result.runs.resize(starts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < starts.size(); i = next++) {
      result.runs[i] = run_one(config, static_cast<int>(i), starts[i], result.M, dir, options.write_files);
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_threads =
      std::min<std::size_t>(options.threads > 0 ? static_cast<std::size_t>(options.threads) : hw, starts.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  if (options.write_files) write_file(dir / "summary.json", summary_json(config, result));
  return result;
}

namespace {

// Linear interpolation of the projected samples at time t; holds the last
// sample beyond the end of the trajectory.
class ProjectedInterpolant {
 public:
  explicit ProjectedInterpolant(const Trajectory& traj) : traj_(traj) {}

  Vec at(double t) {
    const auto& ts = traj_.times;
    while (k_ + 1 < ts.size() && ts[k_ + 1] <= t) ++k_;
    if (k_ + 1 >= ts.size()) return traj_.projected.back();
    const double w = (t - ts[k_]) / (ts[k_ + 1] - ts[k_]);
    return (1.0 - w) * traj_.projected[k_] + w * traj_.projected[k_ + 1];
  }

 private:
  const Trajectory& traj_;
  std::size_t k_ = 0;
};

}  // namespace

std::vector<SweepRow> k_sweep_study(const ExperimentConfig& config, std::vector<double> K_list) {
  if (K_list.empty()) throw ConfigError("K", "sweep needs at least one gain");
  for (std::size_t i = 0; i < K_list.size(); ++i) {
    if (!(K_list[i] > 0.0)) throw ConfigError("K[" + std::to_string(i) + "]", "must be positive");
  }
  std::sort(K_list.begin(), K_list.end());
  const Problem& problem = *config.problem;
  const Vec x0 = initial_conditions(config).front();
  const Trajectory ref = pgf_reference(problem, problem.set.project(x0), config.dt, config.t_end);

  std::vector<SweepRow> rows;
  for (double K : K_list) {
    IntegrateOptions opt;
    opt.dt = config.dt;
    opt.t_end = config.t_end;
    opt.lyapunov_halving = config.lyapunov_halving;
    const Trajectory traj = integrate(FlowField(FlowKind::AntiWindup, K, config.problem), x0, opt);
    SweepRow row;
    row.K = K;
    row.status = std::string(to_string(traj.status));
    if (traj.size() == 0) {
      row.deviation = std::numeric_limits<double>::infinity();
    } else {
      ProjectedInterpolant xbar(traj);
      for (std::size_t j = 0; j < ref.size(); ++j) {
        row.deviation = std::max(row.deviation, (xbar.at(ref.times[j]) - ref.projected[j]).norm());
      }
    }
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "K,deviation,status\n";
  for (const auto& r : rows) out += fmt::format("{:.17g},{:.17g},{}\n", r.K, r.deviation, r.status);
  return out;
}

}  // namespace awflow
