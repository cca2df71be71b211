#include "awflow/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "awflow/errors.hpp"

namespace awflow {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double poly_value(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * t + *it;
  return v;
}

double poly_derivative(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) v = v * t + static_cast<double>(k) * c[k];
  return v;
}

}  // namespace

Objective Objective::quadratic(Mat Q, Vec c, double offset) {
  if (Q.rows() != Q.cols() || Q.rows() != c.size() || c.size() == 0) {
    throw std::invalid_argument("quadratic: Q must be square and match c");
  }
  if ((Q - Q.transpose()).norm() > 1e-12 * (1.0 + Q.norm())) {
    throw std::invalid_argument("quadratic: Q must be symmetric");
  }
  const int n = static_cast<int>(c.size());
  return Objective(Quadratic{std::move(Q), std::move(c), offset}, n);
}

Objective Objective::distance_to(const Vec& p) {
  const int n = static_cast<int>(p.size());
  return quadratic(Mat::Identity(n, n), -p, 0.5 * p.squaredNorm());
}

Objective Objective::rosenbrock(int dimension, double scale) {
  if (dimension < 2) throw std::invalid_argument("rosenbrock: dimension must be at least 2");
  return Objective(Rosenbrock{scale, dimension}, dimension);
}

Objective Objective::nonconvex_poly(std::vector<std::vector<double>> coefficients) {
  if (coefficients.empty()) throw std::invalid_argument("nonconvex_poly: no coordinates");
  const int n = static_cast<int>(coefficients.size());
  return Objective(NonconvexPoly{std::move(coefficients)}, n);
}

double Objective::eval(const Vec& x) const {
  return std::visit(
      overloaded{[&](const Quadratic& q) { return 0.5 * x.dot(q.Q * x) + q.c.dot(x) + q.offset; },
                 [&](const Rosenbrock& r) {
                   double v = 0.0;
                   for (int i = 0; i + 1 < dim_; ++i) {
                     const double a = x(i + 1) - x(i) * x(i);
                     const double b = 1.0 - x(i);
                     v += r.scale * a * a + b * b;
                   }
                   return v;
                 },
                 [&](const NonconvexPoly& p) {
                   double v = 0.0;
                   for (int i = 0; i < dim_; ++i) v += poly_value(p.coefficients[i], x(i));
                   return v;
                 }},
      variant_);
}

Vec Objective::grad(const Vec& x) const {
  return std::visit(overloaded{[&](const Quadratic& q) -> Vec { return q.Q * x + q.c; },
                               [&](const Rosenbrock& r) -> Vec {
                                 Vec g = Vec::Zero(dim_);
                                 for (int i = 0; i + 1 < dim_; ++i) {
                                   const double a = x(i + 1) - x(i) * x(i);
                                   g(i) += -4.0 * r.scale * x(i) * a - 2.0 * (1.0 - x(i));
                                   g(i + 1) += 2.0 * r.scale * a;
                                 }
                                 return g;
                               },
                               [&](const NonconvexPoly& p) -> Vec {
                                 Vec g(dim_);
                                 for (int i = 0; i < dim_; ++i) {
                                   g(i) = poly_derivative(p.coefficients[i], x(i));
                                 }
                                 return g;
                               }},
                    variant_);
}

double grad_bound(const Objective& obj, const ConstraintSet& set, double level, int n_samples,
                  std::uint64_t seed) {
  if (obj.dimension() != set.dimension()) {
    throw std::invalid_argument("grad_bound: objective and set dimensions differ");
  }
  Rng rng(seed);
  double max_norm = -1.0;
  for (int k = 0; k < n_samples; ++k) {
    const Vec x = set.sample_point(rng);
    if (obj.eval(x) <= level) max_norm = std::max(max_norm, obj.grad(x).norm());
  }
  if (max_norm < 0.0) {
    throw EmptySublevel("grad_bound: no sampled point of C has objective value <= " +
                        std::to_string(level));
  }

  const auto* q = std::get_if<Quadratic>(&obj.variant());
  const auto* b = std::get_if<Ball>(&set.variant());
  if (q && b) {
    const double spectral = Eigen::SelfAdjointEigenSolver<Mat>(q->Q).eigenvalues().cwiseAbs().maxCoeff();
    const double analytic = spectral * (b->center.norm() + b->radius) + q->c.norm();
    if (max_norm > analytic * (1.0 + 1e-12) + 1e-12) {
      throw std::logic_error("grad_bound: sampled gradient exceeds the analytic bound");
    }
  }
  return 1.1 * max_norm + 1e-12;
}

}  // namespace awflow
