#pragma once

#include <string>

#include "awflow/flows.hpp"

namespace awflow {

/// Result of checking one property along a recorded trajectory.
/// `passed` iff `worst_violation <= tolerance`.
struct MonitorReport {
  std::string name;
  bool passed = true;
  double worst_violation = 0.0;
  double worst_time = 0.0;
  double tolerance = 0.0;
  int samples_checked = 0;
  int samples_excluded_kink = 0;
};

/// Largest per-step increase of Φ(x̄), relative to 1 + |Φ|. Tolerance 1e−7.
MonitorReport lyapunov_monitor(const Trajectory& traj, const Problem& problem);

/// Along samples away from active-set changes, with x̄̇ from central
/// differences: ⟨ẋ, x̄̇⟩ ≥ 0, ⟨x̄̇, x − x̄⟩ = 0 and d/dt Φ(x̄) = ⟨−ẋ, x̄̇⟩.
/// Inner products are compared relative to the norms involved. Tolerance
/// 1e−4 at dt = 1e−3, growing as dt² for coarser steps.
MonitorReport derivative_identity_monitor(const Trajectory& traj, const Problem& problem, double K);

/// max_t d_C(x(t)) − max{K·M, d_C(x0)} − (1e−6 + dt·M); tolerance 0.
MonitorReport tube_monitor(const Trajectory& traj, const ConstraintSet& set, double K, double M,
                           const Vec& x0);

/// Φ(x̄(t)) ≤ level + 1e−7 and d_C(x(t)) < safe radius. A recorded tube exit
/// always fails.
MonitorReport invariance_monitor(const Trajectory& traj, const ConstraintSet& set,
                                 const Objective& objective, double level);

/// Normal-cone residual of −∇Φ at the final projected state; tolerance 1e−5.
/// Throws NotConverged unless the trajectory status is Converged or Equilibrium.
MonitorReport criticality_monitor(const Trajectory& traj, const Problem& problem);

/// Fraction of samples the report excluded as kink-adjacent.
double kink_exclusion_fraction(const MonitorReport& report);

/// Gain threshold 1/(2·alpha·M). Throws NotApplicable for alpha = 0.
double kstar(double alpha, double M);

}  // namespace awflow
