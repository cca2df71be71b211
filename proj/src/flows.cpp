#include "awflow/flows.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "awflow/errors.hpp"

namespace awflow {

Vec aw_field(const Problem& problem, double K, const Vec& x) {
  const Vec xbar = problem.set.project(x);
  return -problem.objective.grad(xbar) - (x - xbar) / K;
}

Vec penalty_field(const Problem& problem, double K, const Vec& x) {
  const Vec xbar = problem.set.project(x);
  return -problem.objective.grad(x) - (x - xbar) / K;
}

FlowField::FlowField(FlowKind kind, double K, std::shared_ptr<const Problem> problem)
    : kind_(kind), K_(K), problem_(std::move(problem)) {
  if (!(K > 0.0)) throw std::invalid_argument("flow gain K must be positive");
  if (!problem_) throw std::invalid_argument("flow field needs a problem");
  if (problem_->set.dimension() != problem_->objective.dimension()) {
    throw std::invalid_argument("set and objective dimensions differ");
  }
}

Vec FlowField::evaluate(const Vec& x, const Vec& xbar) const {
  const Vec& grad_at = kind_ == FlowKind::AntiWindup ? xbar : x;
  return -problem_->objective.grad(grad_at) - (x - xbar) / K_;
}

std::string_view to_string(TrajectoryStatus status) {
  switch (status) {
    case TrajectoryStatus::Converged:
      return "Converged";
    case TrajectoryStatus::Equilibrium:
      return "Equilibrium";
    case TrajectoryStatus::Horizon:
      return "Horizon";
    case TrajectoryStatus::TubeExit:
      return "TubeExit";
  }
  return "Unknown";
}

namespace {

void record(Trajectory& traj, const ConstraintSet& set, double t, const Vec& x, const Vec& xbar,
            const Vec& f) {
  traj.times.push_back(t);
  traj.states.push_back(x);
  traj.projected.push_back(xbar);
  traj.velocities.push_back(f);
  traj.active_signature.push_back(set.active_signature(xbar));
}

bool outside_tube(const ConstraintSet& set, const Vec& x) {
  const ProxInfo info = set.prox_info();
  return info.alpha > 0.0 && set.distance(x) >= info.safe_radius;
}

// d_C is 1-Lipschitz, so along the segment [x, y] it never exceeds
// (d_C(x) + d_C(y) + ‖y − x‖)/2.
bool step_may_leave_tube(const ConstraintSet& set, const Vec& x, const Vec& y) {
  const ProxInfo info = set.prox_info();
  if (info.alpha == 0.0) return false;
  // rounding slack: a step through the centre of a sphere meets the bound with equality
  const double bound = 0.5 * (set.distance(x) + set.distance(y) + (y - x).norm());
  return bound >= info.safe_radius * (1.0 - 64.0 * std::numeric_limits<double>::epsilon());
}

}  // namespace

Trajectory integrate(const FlowField& field, const Vec& x0, const IntegrateOptions& options) {
  if (!(options.dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  const Problem& problem = field.problem();
  const ConstraintSet& set = problem.set;
  const Objective& obj = problem.objective;
  if (x0.size() != set.dimension()) throw std::invalid_argument("integrate: x0 dimension mismatch");
  if (!x0.allFinite()) throw NonFiniteState("integrate: non-finite initial state");

  Trajectory traj;
  traj.dt_initial = options.dt;
  double dt = options.dt;

  if (outside_tube(set, x0)) {
    traj.status = TrajectoryStatus::TubeExit;
    traj.exit_state = x0;
    traj.dt_final = dt;
    return traj;
  }

  Vec x = x0;
  Vec xbar = set.project(x);
  Vec f = field.evaluate(x, xbar);
  double phi = obj.eval(xbar);
  double t = 0.0;
  double t_base = 0.0;  // time of the last dt change; t = t_base + steps·dt
  long steps = 0;
  record(traj, set, t, x, xbar, f);

  int window = 0;
  auto update_window = [&] {
    if (f.norm() > options.field_tol) {
      window = 0;
      return;
    }
    if (field.kind() == FlowKind::Penalized) {
      ++window;
      return;
    }
    const double crit = set.normal_residual(xbar, -obj.grad(xbar));
    window = crit <= options.criticality_tol ? window + 1 : 0;
  };
  update_window();

  while (window < options.converge_window && t + 0.5 * dt <= options.t_end) {
    Vec stage = x;
    auto eval = [&](const Vec& y) {
      stage = y;
      return field(y);
    };
    Vec x_next;
    try {
      const Vec k1 = f;
      const Vec k2 = eval(x + 0.5 * dt * k1);
      const Vec k3 = eval(x + 0.5 * dt * k2);
      const Vec k4 = eval(x + dt * k3);
      x_next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } catch (const AmbiguousProjection&) {
      traj.status = TrajectoryStatus::TubeExit;
      traj.exit_state = stage;
      traj.dt_final = dt;
      return traj;
    }
    if (!x_next.allFinite()) {
      throw NonFiniteState("integrate: state became non-finite at t = " + std::to_string(t));
    }
    if (outside_tube(set, x_next) || step_may_leave_tube(set, x, x_next)) {
      traj.status = TrajectoryStatus::TubeExit;
      traj.exit_state = x_next;
      traj.dt_final = dt;
      return traj;
    }
    const Vec xbar_next = set.project(x_next);
    const double phi_next = obj.eval(xbar_next);
    if (options.lyapunov_halving && traj.halvings < options.max_halvings &&
        phi_next - phi > options.lyapunov_tol * (1.0 + std::abs(phi))) {
      dt *= 0.5;
      ++traj.halvings;
      t_base = t;
      steps = 0;
      continue;
    }

    t = t_base + static_cast<double>(++steps) * dt;
    x = x_next;
    xbar = xbar_next;
    phi = phi_next;
    f = field.evaluate(x, xbar);
    record(traj, set, t, x, xbar, f);
    update_window();
  }

  if (window >= options.converge_window) {
    traj.status = field.kind() == FlowKind::Penalized ? TrajectoryStatus::Equilibrium
                                                      : TrajectoryStatus::Converged;
  } else {
    traj.status = TrajectoryStatus::Horizon;
  }
  traj.dt_final = dt;
  return traj;
}

Trajectory pgf_reference(const Problem& problem, const Vec& xbar0, double dt, double t_end) {
  if (!(dt > 0.0)) throw std::invalid_argument("pgf_reference: dt must be positive");
  const ConstraintSet& set = problem.set;
  if (!set.contains(xbar0)) throw NotOnSet("pgf_reference: initial point is not on the set");

  Trajectory traj;
  traj.dt_initial = traj.dt_final = dt;
  Vec xbar = xbar0;
  double t = 0.0;
  const auto steps = static_cast<long>(std::llround(t_end / dt));
  for (long k = 0; k <= steps; ++k) {
    const Vec next = set.project(xbar - dt * problem.objective.grad(xbar));
    record(traj, set, t, xbar, xbar, (next - xbar) / dt);
    xbar = next;
    t = static_cast<double>(k + 1) * dt;
  }
  traj.status = TrajectoryStatus::Horizon;
  return traj;
}

}  // namespace awflow
