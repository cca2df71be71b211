#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "awflow/flows.hpp"

namespace awflow {

enum class FlowChoice { AntiWindup, Penalized, PgfReference };

std::string_view to_string(FlowChoice flow);

/// Batch of initial conditions x̄ + s·η with x̄ sampled on C, η a unit normal
/// at x̄ and s uniform in [0, reach). reach is 0.9·safe_radius for
/// prox-regular sets and `width` for convex ones.
struct SamplerSpec {
  int count = 1;
  std::uint64_t seed = 1;
  double width = 1.0;
};

struct ExperimentConfig {
  std::string name = "experiment";
  int dimension = 0;
  std::shared_ptr<const Problem> problem;
  FlowChoice flow = FlowChoice::AntiWindup;
  double K = 0.0;  // unused for pgf_reference
  std::optional<Vec> x0;
  std::optional<SamplerSpec> sampler;
  double dt = 1e-3;
  double t_end = 10.0;
  std::optional<double> level;
  std::vector<std::string> monitors;
  std::string output_dir = "awflow_out";
  int trace_stride = 1;
  int grad_bound_samples = 4000;
  std::uint64_t grad_bound_seed = 1;
  bool lyapunov_halving = true;
};

/// Monitor names accepted in `monitors`.
const std::vector<std::string>& known_monitors();

/// Parses a YAML experiment config. Throws ConfigError naming the offending
/// field path.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Parses a set table on its own, either at top level or under `set`.
ConstraintSet parse_set_spec(const std::string& text);
ConstraintSet load_set_spec(const std::string& path);

/// Output directory after the AWFLOW_OUTPUT_DIR override.
std::string resolved_output_dir(const ExperimentConfig& config);

}  // namespace awflow
