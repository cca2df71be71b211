#pragma once

#include <optional>
#include <string>
#include <vector>

#include "awflow/config.hpp"
#include "awflow/monitors.hpp"

namespace awflow {

/// Per-trajectory outcome kept after the samples themselves are dropped.
struct RunSummary {
  int index = 0;
  Vec x0;
  double level = 0.0;
  std::string status;  // TrajectoryStatus name, or "Error"
  std::string error;   // message of a propagated integration error
  double t_final = 0.0;
  Vec final_state;
  Vec final_projected;
  std::optional<Vec> exit_state;
  int samples = 0;
  int halvings = 0;
  double max_distance = 0.0;
  double final_criticality = 0.0;
  std::vector<MonitorReport> monitors;
  std::string trace_file;  // relative to the output directory; empty if not written

  bool passed() const;
};

struct ExperimentResult {
  std::string name;
  double M = 0.0;
  std::optional<double> kstar;
  std::vector<RunSummary> runs;
  bool all_passed() const;
};

struct RunOptions {
  bool write_files = true;
  int threads = 0;         // 0: hardware concurrency
  std::string output_dir;  // overrides the config and the environment when set
};

/// Initial conditions x̄ + s·η, x̄ sampled on C with Φ(x̄) ≤ level when a
/// level is given. Throws EmptySublevel when no point of C meets the level.
std::vector<Vec> sample_initial_conditions(const Problem& problem, const SamplerSpec& spec,
                                           std::optional<double> level);

/// Initial conditions of a config: the explicit x0 or the sampled batch.
std::vector<Vec> initial_conditions(const ExperimentConfig& config);

/// Integrates every initial condition, applies the requested monitors and,
/// with write_files, writes trace_NNNN.csv files and summary.json into the
/// resolved output directory. Errors raised while integrating one
/// trajectory are recorded in its summary.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// `t,x_1..x_n,xbar_1..xbar_n,phi_xbar,d_C,field_norm,crit_residual,active_sig`
/// with 17 significant digits; every `stride`-th sample plus the last.
std::string trace_csv(const Trajectory& traj, const Problem& problem, int stride = 1);

std::string summary_json(const ExperimentConfig& config, const ExperimentResult& result);

struct SweepRow {
  double K = 0.0;
  double deviation = 0.0;  // sup_t ‖P_C(x_K(t)) − x̄_ref(t)‖
  std::string status;
};

/// Deviation of the anti-windup projected trajectory from the projected
/// gradient flow reference started at P_C(x0), for each K. Rows sorted by K.
/// Uses the config's x0, or the first sampled initial condition.
std::vector<SweepRow> k_sweep_study(const ExperimentConfig& config, std::vector<double> K_list);

std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace awflow
