#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "awflow/geometry.hpp"
#include "awflow/objectives.hpp"

namespace awflow {

/// Constraint set and objective of  min Φ(x) s.t. x ∈ C.
struct Problem {
  ConstraintSet set;
  Objective objective;
};

/// −∇Φ(P_C(x)) − (x − P_C(x))/K. The gradient is taken at the projection.
Vec aw_field(const Problem& problem, double K, const Vec& x);

/// −∇Φ(x) − (x − P_C(x))/K, the gradient flow of Φ + d²_C/(2K).
Vec penalty_field(const Problem& problem, double K, const Vec& x);

enum class FlowKind { AntiWindup, Penalized };

class FlowField {
 public:
  FlowField(FlowKind kind, double K, std::shared_ptr<const Problem> problem);

  /// Field value at x; projects once.
  Vec operator()(const Vec& x) const { return evaluate(x, problem_->set.project(x)); }
  /// Field value at x given xbar = P_C(x).
  Vec evaluate(const Vec& x, const Vec& xbar) const;

  FlowKind kind() const { return kind_; }
  double gain() const { return K_; }
  const Problem& problem() const { return *problem_; }

 private:
  FlowKind kind_;
  double K_;
  std::shared_ptr<const Problem> problem_;
};

enum class TrajectoryStatus {
  Converged,    // field and criticality residual small for the whole window
  Equilibrium,  // penalized flow at rest; its projection need not be critical
  Horizon,      // reached t_end
  TubeExit,     // left the tube where the projection is single-valued
};

std::string_view to_string(TrajectoryStatus status);

/// Samples of x(t), x̄(t) = P_C(x(t)) and ẋ(t) = F(x(t)).
struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<Vec> projected;
  std::vector<Vec> velocities;
  std::vector<std::string> active_signature;
  TrajectoryStatus status = TrajectoryStatus::Horizon;
  double dt_initial = 0.0;
  double dt_final = 0.0;
  int halvings = 0;
  std::optional<Vec> exit_state;  // point where the tube was left, if any

  std::size_t size() const { return times.size(); }
};

struct IntegrateOptions {
  double dt = 1e-3;
  double t_end = 10.0;
  // Online Lyapunov monitor: an increase of Φ(x̄) above
  // lyapunov_tol·(1 + |Φ|) in one step halves dt and retries the step.
  bool lyapunov_halving = true;
  int max_halvings = 4;
  double lyapunov_tol = 1e-7;
  int converge_window = 10;
  double field_tol = 1e-8;
  double criticality_tol = 1e-6;
};

/// Fixed-step classical RK4. Stops early on convergence, records TubeExit
/// (also when a step may have crossed the edge of the tube)
/// instead of throwing, and throws NonFiniteState on overflow.
Trajectory integrate(const FlowField& field, const Vec& x0, const IntegrateOptions& options);

/// Projected explicit Euler x̄ ← P_C(x̄ − dt ∇Φ(x̄)) from xbar0 ∈ C, run to
/// t_end.
Trajectory pgf_reference(const Problem& problem, const Vec& xbar0, double dt, double t_end);

}  // namespace awflow
