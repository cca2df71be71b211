#include "awflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "awflow/calculus.hpp"
#include "awflow/errors.hpp"
#include "awflow/qp_kernel.hpp"

namespace awflow {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double band(double b) { return kActiveBand * (1.0 + std::abs(b)); }

Vec gaussian(int n, Rng& rng) {
  std::normal_distribution<double> nd;
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = nd(rng);
  return v;
}

Vec unit_gaussian(int n, Rng& rng) {
  Vec v = gaussian(n, rng);
  while (v.norm() < 1e-12) v = gaussian(n, rng);
  return v / v.norm();
}

double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::vector<int> active_rows(const Polyhedron& p, const Vec& x) {
  std::vector<int> rows;
  for (int i = 0; i < p.A.rows(); ++i) {
    if (std::abs(p.A.row(i).dot(x) - p.b(i)) <= band(p.b(i))) rows.push_back(i);
  }
  return rows;
}

qp::QpProblem projection_problem(const Polyhedron& p, const Vec& x) {
  return {x, p.A, p.b, p.E, p.d};
}

Mat fd_hessian(const SmoothSublevel& s, const Vec& y) {
  const int n = static_cast<int>(y.size());
  Mat H(n, n);
  for (int j = 0; j < n; ++j) {
    const double h = 1e-6 * (1.0 + std::abs(y(j)));
    Vec yp = y, ym = y;
    yp(j) += h;
    ym(j) -= h;
    H.col(j) = (s.grad(yp) - s.grad(ym)) / (2.0 * h);
  }
  return 0.5 * (H + H.transpose());
}

// Newton iteration on y = x − λ∇g(y), g(y) = 0.
Vec project_sublevel(const SmoothSublevel& s, const Vec& x) {
  const double gx = s.g(x);
  if (gx <= 0.0) return x;
  const int n = static_cast<int>(x.size());
  const Vec gradx = s.grad(x);
  if (gradx.squaredNorm() == 0.0) {
    throw ProjectionNoConverge("smooth sublevel: vanishing gradient at query point");
  }
  Vec y = x;
  double lambda = gx / gradx.squaredNorm();
  for (int it = 0; it < 100; ++it) {
    const Vec gy = s.grad(y);
    const double g = s.g(y);
    const Vec r1 = y - x + lambda * gy;
    if (r1.norm() <= 1e-13 * (1.0 + x.norm()) && std::abs(g) <= 1e-14 * (1.0 + gy.norm())) {
      if (lambda < 0.0) {
        throw ProjectionNoConverge("smooth sublevel: Newton reached a KKT point with negative multiplier");
      }
      return y;
    }
    const Mat H = s.hessian ? s.hessian(y) : fd_hessian(s, y);
    Mat J = Mat::Zero(n + 1, n + 1);
    J.topLeftCorner(n, n) = Mat::Identity(n, n) + lambda * H;
    J.topRightCorner(n, 1) = gy;
    J.bottomLeftCorner(1, n) = gy.transpose();
    Vec rhs(n + 1);
    rhs.head(n) = -r1;
    rhs(n) = -g;
    const Vec step = J.fullPivLu().solve(rhs);
    if (!step.allFinite()) break;
    y += step.head(n);
    lambda += step(n);
  }
  throw ProjectionNoConverge("smooth sublevel: Newton projection did not converge in 100 iterations");
}

}  // namespace

ConstraintSet ConstraintSet::box(Vec lower, Vec upper) {
  if (lower.size() == 0 || lower.size() != upper.size()) {
    throw std::invalid_argument("box: bound dimensions must match and be positive");
  }
  if ((lower.array() > upper.array()).any()) {
    throw std::invalid_argument("box: lower must not exceed upper");
  }
  const int n = static_cast<int>(lower.size());
  ConstraintSet s(Box{lower, upper}, n);
  s.feasible_point_ = lower;
  s.box_ = {lower, upper};
  return s;
}

ConstraintSet ConstraintSet::polyhedron(Mat A, Vec b, Mat E, Vec d) {
  const int n = static_cast<int>(A.rows() > 0 ? A.cols() : E.cols());
  if (n == 0) throw std::invalid_argument("polyhedron: needs at least one constraint");
  if (A.rows() != b.size() || (A.rows() > 0 && A.cols() != n)) {
    throw std::invalid_argument("polyhedron: A and b dimensions mismatch");
  }
  if (E.rows() != d.size() || (E.rows() > 0 && E.cols() != n)) {
    throw std::invalid_argument("polyhedron: E and d dimensions mismatch");
  }
  if (A.rows() == 0) A.resize(0, n);
  if (E.rows() == 0) E.resize(0, n);
  Polyhedron p{std::move(A), std::move(b), std::move(E), std::move(d)};

  Vec feasible;
  try {
    feasible = qp::solve_projection(projection_problem(p, Vec::Zero(n))).solution;
  } catch (const qp::Infeasible& e) {
    throw InfeasibleSet(std::string("polyhedron is empty: ") + e.what());
  }

  // Projections of far points along ±e_i land on the faces maximizing ±x_i,
  // which gives the exact bounding box of a bounded polyhedron.
  constexpr double kFar = 1e6;
  Vec lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    Vec e = Vec::Zero(n);
    e(i) = kFar;
    const double up = qp::solve_projection(projection_problem(p, feasible + e)).solution(i);
    const double down = qp::solve_projection(projection_problem(p, feasible - e)).solution(i);
    hi(i) = up > feasible(i) + 1e5 ? feasible(i) + 10.0 : up;
    lo(i) = down < feasible(i) - 1e5 ? feasible(i) - 10.0 : down;
  }

  ConstraintSet s(std::move(p), n);
  s.feasible_point_ = feasible;
  s.box_ = {lo, hi};
  return s;
}

ConstraintSet ConstraintSet::ball(Vec center, double radius) {
  if (center.size() == 0) throw std::invalid_argument("ball: empty center");
  if (!(radius > 0.0)) throw std::invalid_argument("ball: radius must be positive");
  const int n = static_cast<int>(center.size());
  ConstraintSet s(Ball{center, radius}, n);
  s.feasible_point_ = center;
  s.box_ = {center.array() - radius, center.array() + radius};
  return s;
}

ConstraintSet ConstraintSet::sphere(Vec center, double radius) {
  if (center.size() == 0) throw std::invalid_argument("sphere: empty center");
  if (!(radius > 0.0)) throw std::invalid_argument("sphere: radius must be positive");
  const int n = static_cast<int>(center.size());
  ConstraintSet s(Sphere{center, radius}, n);
  s.feasible_point_ = center;
  s.feasible_point_(0) += radius;
  s.box_ = {center.array() - radius, center.array() + radius};
  return s;
}

ConstraintSet ConstraintSet::smooth_sublevel(SmoothSublevel spec, int validation_samples,
                                             std::uint64_t validation_seed) {
  if (!spec.g || !spec.grad) throw std::invalid_argument("smooth sublevel: g and grad are required");
  if (!(spec.alpha > 0.0)) throw std::invalid_argument("smooth sublevel: alpha must be positive");
  if (spec.box_lower.size() == 0 || spec.box_lower.size() != spec.box_upper.size() ||
      (spec.box_lower.array() > spec.box_upper.array()).any()) {
    throw std::invalid_argument("smooth sublevel: invalid sampling box");
  }
  const int n = static_cast<int>(spec.box_lower.size());
  const double alpha = spec.alpha;
  Vec lo = spec.box_lower, hi = spec.box_upper;
  ConstraintSet s(std::move(spec), n);
  s.box_ = {lo, hi};

  Rng rng(validation_seed);
  bool found = false;
  for (int i = 0; i < 10000 && !found; ++i) {
    Vec y(n);
    for (int k = 0; k < n; ++k) y(k) = uniform(rng, lo(k), hi(k));
    if (std::get<SmoothSublevel>(s.variant_).g(y) <= 0.0) {
      s.feasible_point_ = y;
      found = true;
    }
  }
  if (!found) throw InfeasibleSet("smooth sublevel: no feasible point found in the sampling box");

  const auto check = check_alpha_proximal(s, alpha, validation_samples, validation_seed);
  if (!check.ok) {
    throw std::invalid_argument("smooth sublevel: alpha-proximal inequality violated by " +
                                std::to_string(check.worst_violation));
  }
  return s;
}

bool ConstraintSet::is_convex() const {
  return std::holds_alternative<Box>(variant_) || std::holds_alternative<Polyhedron>(variant_) ||
         std::holds_alternative<Ball>(variant_);
}

std::string_view ConstraintSet::kind_name() const {
  return std::visit(overloaded{[](const Box&) { return std::string_view("box"); },
                               [](const Polyhedron&) { return std::string_view("polyhedron"); },
                               [](const Ball&) { return std::string_view("ball"); },
                               [](const Sphere&) { return std::string_view("sphere"); },
                               [](const SmoothSublevel&) { return std::string_view("smooth_sublevel"); }},
                    variant_);
}

Vec ConstraintSet::project_unchecked(const Vec& x) const {
  return std::visit(
      overloaded{
          [&](const Box& b) -> Vec { return x.cwiseMax(b.lower).cwiseMin(b.upper); },
          [&](const Polyhedron& p) -> Vec {
            return qp::solve_projection(projection_problem(p, x)).solution;
          },
          [&](const Ball& b) -> Vec {
            const double rho = (x - b.center).norm();
            if (rho <= b.radius) return x;
            return b.center + (b.radius / rho) * (x - b.center);
          },
          [&](const Sphere& s) -> Vec {
            const double rho = (x - s.center).norm();
            if (rho < 1e-8 * s.radius) {
              throw AmbiguousProjection("sphere: query point coincides with the center");
            }
            return s.center + (s.radius / rho) * (x - s.center);
          },
          [&](const SmoothSublevel& s) -> Vec { return project_sublevel(s, x); }},
      variant_);
}

Vec ConstraintSet::project(const Vec& x) const {
  if (x.size() != dim_) throw std::invalid_argument("project: dimension mismatch");
  Vec y = project_unchecked(x);
  const ProxInfo info = prox_info();
  if (info.alpha > 0.0 && (x - y).norm() >= info.safe_radius) {
    throw AmbiguousProjection("projection requested outside the safe tube (d_C >= " +
                              std::to_string(info.safe_radius) + ")");
  }
  return y;
}

double ConstraintSet::distance(const Vec& x) const {
  if (const auto* s = std::get_if<Sphere>(&variant_)) {
    return std::abs((x - s->center).norm() - s->radius);
  }
  return (x - project_unchecked(x)).norm();
}

bool ConstraintSet::contains(const Vec& x, double tol) const {
  return std::visit(
      overloaded{
          [&](const Box& b) {
            return ((b.lower - x).maxCoeff() <= tol) && ((x - b.upper).maxCoeff() <= tol);
          },
          [&](const Polyhedron& p) {
            for (int i = 0; i < p.A.rows(); ++i) {
              if (p.A.row(i).dot(x) - p.b(i) > tol * p.A.row(i).norm()) return false;
            }
            for (int i = 0; i < p.E.rows(); ++i) {
              if (std::abs(p.E.row(i).dot(x) - p.d(i)) > tol * p.E.row(i).norm()) return false;
            }
            return true;
          },
          [&](const Ball& b) { return (x - b.center).norm() <= b.radius + tol; },
          [&](const Sphere& s) { return std::abs((x - s.center).norm() - s.radius) <= tol; },
          [&](const SmoothSublevel& s) {
            const double g = s.g(x);
            return g <= 0.0 || g <= tol * s.grad(x).norm();
          }},
      variant_);
}

void ConstraintSet::require_on_set(const Vec& xbar) const {
  if (xbar.size() != dim_) throw std::invalid_argument("dimension mismatch");
  if (!contains(xbar)) throw NotOnSet("point is not on the constraint set");
}

Vec ConstraintSet::tangent_project(const Vec& xbar, const Vec& v) const {
  require_on_set(xbar);
  return std::visit(
      overloaded{
          [&](const Box& b) -> Vec {
            // The tangent cone of a box is a product of half-lines, so the
            // cone projection separates per coordinate.
            Vec w = v;
            for (int i = 0; i < dim_; ++i) {
              const bool lo = std::abs(xbar(i) - b.lower(i)) <= band(b.lower(i));
              const bool hi = std::abs(xbar(i) - b.upper(i)) <= band(b.upper(i));
              if (lo && hi) {
                w(i) = 0.0;
              } else if (lo) {
                w(i) = std::max(w(i), 0.0);
              } else if (hi) {
                w(i) = std::min(w(i), 0.0);
              }
            }
            return w;
          },
          [&](const Polyhedron& p) -> Vec {
            const auto rows = active_rows(p, xbar);
            Mat A(static_cast<Eigen::Index>(rows.size()), dim_);
            for (std::size_t k = 0; k < rows.size(); ++k) A.row(k) = p.A.row(rows[k]);
            return qp::solve_cone_projection(A, v, p.E);
          },
          [&](const Ball& b) -> Vec {
            const Vec r = xbar - b.center;
            if (r.norm() < b.radius - band(b.radius)) return v;
            const Vec n = r / r.norm();
            return v - std::max(0.0, v.dot(n)) * n;
          },
          [&](const Sphere& s) -> Vec {
            const Vec n = (xbar - s.center).normalized();
            return v - v.dot(n) * n;
          },
          [&](const SmoothSublevel& s) -> Vec {
            const Vec gr = s.grad(xbar);
            if (s.g(xbar) < -kActiveBand * gr.norm()) return v;
            const Vec n = gr.normalized();
            return v - std::max(0.0, v.dot(n)) * n;
          }},
      variant_);
}

double ConstraintSet::normal_residual(const Vec& xbar, const Vec& eta) const {
  return tangent_project(xbar, eta).norm();
}

ProxInfo ConstraintSet::prox_info() const {
  if (const auto* s = std::get_if<Sphere>(&variant_)) {
    return {1.0 / (2.0 * s->radius), s->radius};
  }
  if (const auto* s = std::get_if<SmoothSublevel>(&variant_)) {
    return {s->alpha, 1.0 / (2.0 * s->alpha)};
  }
  return {};
}

std::string ConstraintSet::active_signature(const Vec& xbar) const {
  return std::visit(
      overloaded{
          [&](const Box& b) {
            std::string sig(static_cast<std::size_t>(dim_), '-');
            for (int i = 0; i < dim_; ++i) {
              const bool lo = std::abs(xbar(i) - b.lower(i)) <= band(b.lower(i));
              const bool hi = std::abs(xbar(i) - b.upper(i)) <= band(b.upper(i));
              sig[i] = lo && hi ? 'e' : lo ? 'l' : hi ? 'u' : '-';
            }
            return sig;
          },
          [&](const Polyhedron& p) {
            std::string sig(static_cast<std::size_t>(p.A.rows()), '0');
            for (int i : active_rows(p, xbar)) sig[i] = '1';
            return sig.empty() ? std::string("-") : sig;
          },
          [&](const Ball& b) {
            return std::string((xbar - b.center).norm() < b.radius - band(b.radius) ? "i" : "b");
          },
          [&](const Sphere&) { return std::string("s"); },
          [&](const SmoothSublevel& s) {
            return std::string(s.g(xbar) < -kActiveBand * s.grad(xbar).norm() ? "i" : "b");
          }},
      variant_);
}

std::pair<Vec, Vec> ConstraintSet::sampling_box() const { return box_; }

Vec ConstraintSet::sample_point(Rng& rng) const {
  return std::visit(
      overloaded{
          [&](const Box& b) -> Vec {
            Vec x(dim_);
            for (int i = 0; i < dim_; ++i) {
              const double u = uniform(rng);
              x(i) = u < 0.25 ? b.lower(i) : u < 0.5 ? b.upper(i) : uniform(rng, b.lower(i), b.upper(i));
            }
            return x;
          },
          [&](const Polyhedron& p) -> Vec {
            const Vec span = box_.second - box_.first;
            Vec y(dim_);
            for (int i = 0; i < dim_; ++i) {
              y(i) = uniform(rng, box_.first(i) - 0.25 * span(i), box_.second(i) + 0.25 * span(i));
            }
            return qp::solve_projection(projection_problem(p, y)).solution;
          },
          [&](const Ball& b) -> Vec {
            const Vec dir = unit_gaussian(dim_, rng);
            const double r = uniform(rng) < 0.5 ? b.radius
                                                : b.radius * std::pow(uniform(rng), 1.0 / dim_);
            return b.center + r * dir;
          },
          [&](const Sphere& s) -> Vec {
            if (uniform(rng) < 0.25) {
              // Coordinate pole center ± r·e_i.
              const int i = static_cast<int>(uniform(rng) * dim_) % dim_;
              Vec x = s.center;
              x(i) += uniform(rng) < 0.5 ? s.radius : -s.radius;
              return x;
            }
            return s.center + s.radius * unit_gaussian(dim_, rng);
          },
          [&](const SmoothSublevel& s) -> Vec {
            const double safe = 1.0 / (2.0 * s.alpha);
            for (int attempt = 0; attempt < 1000; ++attempt) {
              Vec y(dim_);
              for (int i = 0; i < dim_; ++i) y(i) = uniform(rng, s.box_lower(i), s.box_upper(i));
              if (s.g(y) <= 0.0) return y;
              try {
                Vec x = project_sublevel(s, y);
                if ((x - y).norm() < safe) return x;
              } catch (const ProjectionNoConverge&) {
              }
            }
            return feasible_point_;
          }},
      variant_);
}

std::vector<Vec> ConstraintSet::normal_generators(const Vec& xbar) const {
  std::vector<Vec> gens;
  auto unit = [&](int i, double sign) {
    Vec e = Vec::Zero(dim_);
    e(i) = sign;
    return e;
  };
  std::visit(overloaded{
                 [&](const Box& b) {
                   for (int i = 0; i < dim_; ++i) {
                     if (std::abs(xbar(i) - b.lower(i)) <= band(b.lower(i))) gens.push_back(unit(i, -1.0));
                     if (std::abs(xbar(i) - b.upper(i)) <= band(b.upper(i))) gens.push_back(unit(i, 1.0));
                   }
                 },
                 [&](const Polyhedron& p) {
                   for (int i : active_rows(p, xbar)) gens.push_back(p.A.row(i).transpose().normalized());
                   for (int i = 0; i < p.E.rows(); ++i) {
                     const Vec e = p.E.row(i).transpose().normalized();
                     gens.push_back(e);
                     gens.push_back(-e);
                   }
                 },
                 [&](const Ball& b) {
                   const Vec r = xbar - b.center;
                   if (r.norm() >= b.radius - band(b.radius)) gens.push_back(r.normalized());
                 },
                 [&](const Sphere& s) {
                   const Vec n = (xbar - s.center).normalized();
                   gens.push_back(n);
                   gens.push_back(-n);
                 },
                 [&](const SmoothSublevel& s) {
                   const Vec gr = s.grad(xbar);
                   if (s.g(xbar) >= -kActiveBand * gr.norm()) gens.push_back(gr.normalized());
                 }},
             variant_);
  return gens;
}

Vec ConstraintSet::sample_unit_normal(const Vec& xbar, Rng& rng) const {
  const auto gens = normal_generators(xbar);
  if (gens.empty()) return Vec::Zero(dim_);
  std::uniform_int_distribution<std::size_t> pick(0, gens.size() - 1);
  if (gens.size() == 1 || uniform(rng) < 1.0 / 3.0) return gens[pick(rng)];
  std::exponential_distribution<double> weight(1.0);
  Vec eta = Vec::Zero(dim_);
  for (const auto& g : gens) eta += weight(rng) * g;
  if (eta.norm() < 1e-6) return gens[pick(rng)];
  return eta / eta.norm();
}

Vec ConstraintSet::opposite_point(const Vec& x) const {
  return std::visit(overloaded{[&](const Box& b) -> Vec { return b.lower + b.upper - x; },
                               [&](const Ball& b) -> Vec { return 2.0 * b.center - x; },
                               [&](const Sphere& s) -> Vec { return 2.0 * s.center - x; },
                               [&](const auto&) -> Vec {
                                 const Vec mid = 0.5 * (box_.first + box_.second);
                                 Vec target = 2.0 * mid - x;
                                 try {
                                   return project_unchecked(target);
                                 } catch (const Error&) {
                                   return feasible_point_;
                                 }
                               }},
                    variant_);
}

}  // namespace awflow
