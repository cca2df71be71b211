#pragma once

// Reference computations used only by the tests. None of these go through the
// library's projection code paths.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace awflow::oracle {

/// Euclidean projection onto {x ≥ 0, Σx = 1} by the sort-and-threshold rule.
inline Eigen::VectorXd simplex_projection(const Eigen::VectorXd& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0);
}

/// Dense grid minimizer of ‖y − x‖ over {y | A y ≤ b} inside [lo, hi]^n.
inline Eigen::VectorXd grid_projection(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                       const Eigen::VectorXd& x, double lo, double hi, double step) {
  const int n = static_cast<int>(x.size());
  const int count = static_cast<int>(std::round((hi - lo) / step)) + 1;
  Eigen::VectorXd best = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
  double best_d = std::numeric_limits<double>::infinity();
  std::vector<int> idx(n, 0);
  Eigen::VectorXd y(n);
  while (true) {
    for (int i = 0; i < n; ++i) y(i) = lo + idx[i] * step;
    if (((A * y - b).array() <= 1e-12).all()) {
      const double d = (y - x).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = y;
      }
    }
    int k = 0;
    while (k < n && ++idx[k] == count) idx[k++] = 0;
    if (k == n) break;
  }
  return best;
}

/// Projection onto cone(columns of G) = {G λ | λ ≥ 0} by enumerating the
/// support of λ (small column counts only).
inline Eigen::VectorXd conic_hull_projection(const Eigen::MatrixXd& G, const Eigen::VectorXd& v) {
  const int m = static_cast<int>(G.cols());
  Eigen::VectorXd best = Eigen::VectorXd::Zero(v.size());
  double best_d = v.squaredNorm();
  for (int mask = 1; mask < (1 << m); ++mask) {
    std::vector<int> cols;
    for (int j = 0; j < m; ++j)
      if (mask & (1 << j)) cols.push_back(j);
    Eigen::MatrixXd S(v.size(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) S.col(k) = G.col(cols[k]);
    const Eigen::VectorXd lambda = S.colPivHouseholderQr().solve(v);
    if ((lambda.array() < -1e-12).any()) continue;
    const Eigen::VectorXd p = S * lambda;
    const double d = (p - v).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = p;
    }
  }
  return best;
}

/// Central finite-difference gradient.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

}  // namespace awflow::oracle
