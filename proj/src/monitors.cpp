#include "awflow/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "awflow/errors.hpp"

namespace awflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Worst {
  double value = -kInf;
  double time = 0.0;

  void update(double v, double t) {
    if (v > value) {
      value = v;
      time = t;
    }
  }
};

MonitorReport finish(std::string name, const Worst& worst, double tolerance, int checked,
                     int excluded) {
  MonitorReport r;
  r.name = std::move(name);
  r.worst_violation = checked > 0 ? worst.value : 0.0;
  r.worst_time = worst.time;
  r.tolerance = tolerance;
  r.samples_checked = checked;
  r.samples_excluded_kink = excluded;
  r.passed = r.worst_violation <= tolerance;
  return r;
}

}  // namespace

MonitorReport lyapunov_monitor(const Trajectory& traj, const Problem& problem) {
  Worst worst;
  int checked = 0;
  double prev = traj.size() > 0 ? problem.objective.eval(traj.projected[0]) : 0.0;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double phi = problem.objective.eval(traj.projected[i]);
    worst.update((phi - prev) / (1.0 + std::abs(prev)), traj.times[i]);
    prev = phi;
    ++checked;
  }
  return finish("lyapunov", worst, 1e-7, checked, 0);
}

MonitorReport derivative_identity_monitor(const Trajectory& traj, const Problem& problem,
                                          double K) {
  const double dt = traj.dt_initial > 0.0 ? traj.dt_initial : 1e-3;
  const double tol = 1e-4 * std::max(1.0, (dt / 1e-3) * (dt / 1e-3));
  Worst worst;
  int checked = 0;
  int excluded = 0;
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    if (traj.active_signature[i - 1] != traj.active_signature[i] ||
        traj.active_signature[i + 1] != traj.active_signature[i]) {
      ++excluded;
      continue;
    }
    const double span = traj.times[i + 1] - traj.times[i - 1];
    const Vec xbar_dot = (traj.projected[i + 1] - traj.projected[i - 1]) / span;
    const double phi_dot = (problem.objective.eval(traj.projected[i + 1]) -
                            problem.objective.eval(traj.projected[i - 1])) /
                           span;
    const Vec offset = traj.states[i] - traj.projected[i];
    // Anti-windup velocity rebuilt from K rather than read from the trace.
    const Vec x_dot = -problem.objective.grad(traj.projected[i]) - offset / K;
    const double scale = 1.0 + x_dot.norm() * xbar_dot.norm();

    const double monotone = -x_dot.dot(xbar_dot) / scale;
    const double orthogonal = std::abs(xbar_dot.dot(offset)) / (1.0 + offset.norm());
    const double chain = std::abs(phi_dot + x_dot.dot(xbar_dot)) / scale;
    worst.update(std::max({monotone, orthogonal, chain}), traj.times[i]);
    ++checked;
  }
  return finish("derivative_identity", worst, tol, checked, excluded);
}

MonitorReport tube_monitor(const Trajectory& traj, const ConstraintSet& set, double K, double M,
                           const Vec& x0) {
  const double bound = std::max(K * M, set.distance(x0));
  const double slack = 1e-6 + traj.dt_initial * M;
  Worst worst;
  int checked = 0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    worst.update((traj.states[i] - traj.projected[i]).norm() - bound - slack, traj.times[i]);
    ++checked;
  }
  if (traj.exit_state) {
    worst.update(set.distance(*traj.exit_state) - bound - slack,
                 traj.times.empty() ? 0.0 : traj.times.back());
  }
  return finish("tube", worst, 0.0, checked, 0);
}

MonitorReport invariance_monitor(const Trajectory& traj, const ConstraintSet& set,
                                 const Objective& objective, double level) {
  constexpr double kTol = 1e-7;
  const double safe = set.prox_info().safe_radius;
  Worst worst;
  int checked = 0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double level_excess = objective.eval(traj.projected[i]) - level;
    // Shifted so that d_C = safe radius sits exactly at the tolerance.
    const double tube_excess = (traj.states[i] - traj.projected[i]).norm() - safe + kTol;
    worst.update(std::max(level_excess, tube_excess), traj.times[i]);
    ++checked;
  }
  if (traj.exit_state) {
    const double d = set.distance(*traj.exit_state);
    worst.update(std::max(d - safe, 0.0) + 2.0 * kTol, traj.times.empty() ? 0.0 : traj.times.back());
  }
  return finish("invariance", worst, kTol, checked, 0);
}

MonitorReport criticality_monitor(const Trajectory& traj, const Problem& problem) {
  const bool at_rest =
      traj.status == TrajectoryStatus::Converged || traj.status == TrajectoryStatus::Equilibrium;
  if (!at_rest || traj.size() == 0) {
    throw NotConverged("criticality monitor needs a trajectory at rest, status is " +
                       std::string(to_string(traj.status)));
  }
  const Vec& xbar = traj.projected.back();
  Worst worst;
  worst.update(problem.set.normal_residual(xbar, -problem.objective.grad(xbar)), traj.times.back());
  return finish("criticality", worst, 1e-5, 1, 0);
}

double kink_exclusion_fraction(const MonitorReport& report) {
  const int total = report.samples_checked + report.samples_excluded_kink;
  return total > 0 ? static_cast<double>(report.samples_excluded_kink) / total : 0.0;
}

double kstar(double alpha, double M) {
  if (alpha == 0.0) throw NotApplicable("kstar: convex sets admit every K > 0");
  if (!(alpha > 0.0) || !(M > 0.0)) throw std::invalid_argument("kstar: alpha and M must be positive");
  return 1.0 / (2.0 * alpha * M);
}

}  // namespace awflow
