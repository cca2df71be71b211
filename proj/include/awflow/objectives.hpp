#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "awflow/geometry.hpp"
#include "awflow/types.hpp"

namespace awflow {

/// ½ xᵀQx + cᵀx + offset, Q symmetric.
struct Quadratic {
  Mat Q;
  Vec c;
  double offset = 0.0;
};

/// Σᵢ scale·(x_{i+1} − x_i²)² + (1 − x_i)².
struct Rosenbrock {
  double scale = 100.0;
  int dimension = 2;
};

/// Separable polynomial Σᵢ pᵢ(xᵢ); coefficients[i] lists the coefficients of
/// pᵢ in ascending powers. An empty list means pᵢ ≡ 0.
struct NonconvexPoly {
  std::vector<std::vector<double>> coefficients;
};

class Objective {
 public:
  using Variant = std::variant<Quadratic, Rosenbrock, NonconvexPoly>;

  static Objective quadratic(Mat Q, Vec c, double offset = 0.0);
  /// ½‖x − p‖².
  static Objective distance_to(const Vec& p);
  static Objective rosenbrock(int dimension, double scale = 100.0);
  static Objective nonconvex_poly(std::vector<std::vector<double>> coefficients);

  double eval(const Vec& x) const;
  Vec grad(const Vec& x) const;

  int dimension() const { return dim_; }
  const Variant& variant() const { return variant_; }

 private:
  Objective(Variant v, int dim) : variant_(std::move(v)), dim_(dim) {}

  Variant variant_;
  int dim_;
};

/// Bound M on ‖∇Φ‖ over {x ∈ C : Φ(x) ≤ level}: 1.1 × the largest sampled
/// gradient norm. Candidates come from the set's sampler, so a larger level
/// accepts a superset of the same candidates. For a quadratic on a ball the
/// sampled maximum is cross-checked against ‖Q‖(‖center‖ + r) + ‖c‖.
///
/// Throws EmptySublevel when no candidate satisfies the level.
double grad_bound(const Objective& obj, const ConstraintSet& set, double level, int n_samples,
                  std::uint64_t seed);

}  // namespace awflow
