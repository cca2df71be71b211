#pragma once

#include <vector>

#include "awflow/types.hpp"

namespace awflow::qp {

/// min ½‖y − target‖²  s.t.  A y ≤ b,  E y = d.
/// E and d may be empty (zero rows).
struct QpProblem {
  Vec target;
  Mat A;
  Vec b;
  Mat E;
  Vec d;
};

struct QpSolution {
  Vec solution;
  std::vector<int> active_set;  // indices into the rows of A, ascending
  Vec multipliers;              // one per row of A, zero when inactive
  Vec eq_multipliers;           // one per row of E
  int iterations = 0;
};

struct QpOptions {
  // Inequalities tried first when violated; typically the previous solve's
  // active set along a trajectory.
  std::vector<int> warm_active;
};

/// Dense active-set projection solver (dual method, identity Hessian).
/// Entering constraints are chosen by smallest index among the violated ones,
/// after any violated warm-start rows.
///
/// Throws qp::Infeasible when the constraints are inconsistent and
/// qp::MaxIterations after 50·(m+n) iterations.
QpSolution solve_projection(const QpProblem& problem, const QpOptions& options = {});

/// Projects v onto the polyhedral cone {w | A w ≤ 0, E w = 0}.
Vec solve_cone_projection(const Mat& A, const Vec& v, const Mat& E = Mat());

/// Max of primal infeasibility, dual infeasibility, complementarity and
/// stationarity violation.
double kkt_residual(const QpProblem& problem, const QpSolution& sol);

}  // namespace awflow::qp
