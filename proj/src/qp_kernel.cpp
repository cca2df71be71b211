#include "awflow/qp_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "awflow/errors.hpp"

namespace awflow::qp {

namespace {

struct ActiveRow {
  bool equality;
  int row;
  double mult;
};

class Workspace {
 public:
  Workspace(const QpProblem& p) : p_(p), n_(static_cast<int>(p.target.size())) {}

  Vec normal(const ActiveRow& r) const {
    return r.equality ? Vec(p_.E.row(r.row).transpose()) : Vec(p_.A.row(r.row).transpose());
  }

  // Splits a = N r + z with z orthogonal to the active normals.
  void decompose(const Vec& a, Vec& r, Vec& z) const {
    const int q = static_cast<int>(active.size());
    if (q == 0) {
      r.resize(0);
      z = a;
      return;
    }
    Mat N(n_, q);
    for (int k = 0; k < q; ++k) N.col(k) = normal(active[k]);
    r = (N.transpose() * N).ldlt().solve(N.transpose() * a);
    z = a - N * r;
  }

  std::vector<ActiveRow> active;

 private:
  const QpProblem& p_;
  int n_;
};

double feas_tol(double b, const Vec& a, const Vec& y) {
  return 1e-12 * (1.0 + std::abs(b) + a.norm() * y.norm());
}

}  // namespace

QpSolution solve_projection(const QpProblem& problem, const QpOptions& options) {
  const int n = static_cast<int>(problem.target.size());
  const int m = static_cast<int>(problem.A.rows());
  const int me = static_cast<int>(problem.E.rows());
  if (m > 0 && (problem.A.cols() != n || problem.b.size() != m)) {
    throw std::invalid_argument("qp: inequality dimensions mismatch");
  }
  if (me > 0 && (problem.E.cols() != n || problem.d.size() != me)) {
    throw std::invalid_argument("qp: equality dimensions mismatch");
  }

  Workspace ws(problem);
  Vec y = problem.target;
  Vec r, z;
  int iterations = 0;
  const int cap = 50 * (m + me + n);

  // Equalities first; their multipliers are sign-free and never block.
  for (int j = 0; j < me; ++j) {
    const Vec a = problem.E.row(j).transpose();
    ws.decompose(a, r, z);
    const double viol = a.dot(y) - problem.d(j);
    if (z.norm() <= 1e-10 * a.norm()) {
      if (std::abs(viol) > 1e-9 * (1.0 + std::abs(problem.d(j)))) {
        throw Infeasible("qp: inconsistent equality constraints");
      }
      continue;  // dependent row, already satisfied
    }
    const double s = viol / z.squaredNorm();
    y -= s * z;
    for (std::size_t k = 0; k < ws.active.size(); ++k) ws.active[k].mult -= s * r(k);
    ws.active.push_back({true, j, s});
  }

  auto is_active = [&](int i) {
    return std::any_of(ws.active.begin(), ws.active.end(),
                       [i](const ActiveRow& a) { return !a.equality && a.row == i; });
  };
  auto violated = [&](int i) {
    const Vec a = problem.A.row(i).transpose();
    return a.dot(y) - problem.b(i) > feas_tol(problem.b(i), a, y);
  };
  auto pick_entering = [&]() -> int {
    for (int i : options.warm_active) {
      if (i >= 0 && i < m && !is_active(i) && violated(i)) return i;
    }
    for (int i = 0; i < m; ++i) {
      if (!is_active(i) && violated(i)) return i;
    }
    return -1;
  };

  for (int p = pick_entering(); p >= 0; p = pick_entering()) {
    const Vec a = problem.A.row(p).transpose();
    double mult_p = 0.0;
    while (true) {
      if (++iterations > cap) {
        throw MaxIterations("qp: iteration cap " + std::to_string(cap) + " reached");
      }
      ws.decompose(a, r, z);
      const double viol = a.dot(y) - problem.b(p);

      double s1 = std::numeric_limits<double>::infinity();
      int block = -1;
      for (std::size_t k = 0; k < ws.active.size(); ++k) {
        if (ws.active[k].equality || r(k) <= 1e-14) continue;
        const double ratio = ws.active[k].mult / r(k);
        if (ratio < s1 || (ratio == s1 && ws.active[k].row < ws.active[block].row)) {
          s1 = ratio;
          block = static_cast<int>(k);
        }
      }

      const bool dependent = z.norm() <= 1e-10 * a.norm();
      if (dependent && block < 0) {
        throw Infeasible("qp: constraint " + std::to_string(p) + " cannot be satisfied");
      }
      const double s2 = dependent ? std::numeric_limits<double>::infinity()
                                  : viol / z.squaredNorm();
      const double s = std::min(s1, s2);
      if (!dependent) y -= s * z;
      for (std::size_t k = 0; k < ws.active.size(); ++k) ws.active[k].mult -= s * r(k);
      mult_p += s;

      if (s2 <= s1) {
        ws.active.push_back({false, p, mult_p});
        break;
      }
      ws.active.erase(ws.active.begin() + block);
    }
  }

  QpSolution sol;
  sol.solution = y;
  sol.multipliers = Vec::Zero(m);
  sol.eq_multipliers = Vec::Zero(me);
  for (const auto& a : ws.active) {
    if (a.equality) {
      sol.eq_multipliers(a.row) = a.mult;
    } else {
      sol.multipliers(a.row) = std::max(a.mult, 0.0);
      sol.active_set.push_back(a.row);
    }
  }
  std::sort(sol.active_set.begin(), sol.active_set.end());
  sol.iterations = iterations;
  return sol;
}

Vec solve_cone_projection(const Mat& A, const Vec& v, const Mat& E) {
  QpProblem p;
  p.target = v;
  p.A = A;
  p.b = Vec::Zero(A.rows());
  p.E = E;
  p.d = Vec::Zero(E.rows());
  if (A.rows() == 0 && E.rows() == 0) return v;
  return solve_projection(p).solution;
}

double kkt_residual(const QpProblem& problem, const QpSolution& sol) {
  const Vec& y = sol.solution;
  double res = 0.0;
  Vec stat = y - problem.target;
  if (problem.A.rows() > 0) {
    const Vec slack = problem.A * y - problem.b;
    res = std::max(res, slack.maxCoeff());
    res = std::max(res, (-sol.multipliers).maxCoeff());
    res = std::max(res, slack.cwiseProduct(sol.multipliers).cwiseAbs().maxCoeff());
    stat += problem.A.transpose() * sol.multipliers;
  }
  if (problem.E.rows() > 0) {
    res = std::max(res, (problem.E * y - problem.d).cwiseAbs().maxCoeff());
    stat += problem.E.transpose() * sol.eq_multipliers;
  }
  return std::max(res, stat.lpNorm<Eigen::Infinity>());
}

}  // namespace awflow::qp
