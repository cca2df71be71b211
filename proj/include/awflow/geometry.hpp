#pragma once

#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "awflow/types.hpp"

namespace awflow {

/// Axis-aligned box lower ≤ x ≤ upper.
struct Box {
  Vec lower;
  Vec upper;
};

/// {y | A y ≤ b, E y = d}. E may have zero rows.
struct Polyhedron {
  Mat A;
  Vec b;
  Mat E;
  Vec d;
};

struct Ball {
  Vec center;
  double radius = 1.0;
};

struct Sphere {
  Vec center;
  double radius = 1.0;
};

/// {y | g(y) ≤ 0} for a smooth g, with a user supplied prox-regularity
/// constant. The box bounds the region used for sampling and validation.
struct SmoothSublevel {
  std::function<double(const Vec&)> g;
  std::function<Vec(const Vec&)> grad;
  std::function<Mat(const Vec&)> hessian;  // optional; finite differences of grad otherwise
  double alpha = 0.0;
  Vec box_lower;
  Vec box_upper;
};

struct ProxInfo {
  double alpha = 0.0;  // 0 encodes "convex, any alpha > 0 works"
  double safe_radius = std::numeric_limits<double>::infinity();
};

/// Closed constraint set with projection, distance and cone operations.
///
/// Instances are immutable once built; all member functions are const and
/// safe to call concurrently.
class ConstraintSet {
 public:
  using Variant = std::variant<Box, Polyhedron, Ball, Sphere, SmoothSublevel>;

  static ConstraintSet box(Vec lower, Vec upper);
  /// Certifies feasibility by projecting the origin; throws InfeasibleSet.
  static ConstraintSet polyhedron(Mat A, Vec b, Mat E = Mat(), Vec d = Vec());
  static ConstraintSet ball(Vec center, double radius);
  static ConstraintSet sphere(Vec center, double radius);
  /// Validates alpha-proximality on `validation_samples` sampled points.
  static ConstraintSet smooth_sublevel(SmoothSublevel spec, int validation_samples = 2000,
                                       std::uint64_t validation_seed = 17);

  int dimension() const { return dim_; }
  bool is_convex() const;
  std::string_view kind_name() const;
  const Variant& variant() const { return variant_; }

  /// Nearest point of C. Throws AmbiguousProjection outside the safe tube.
  Vec project(const Vec& x) const;
  double distance(const Vec& x) const;
  bool contains(const Vec& x, double tol = kMembershipTol) const;

  /// Projection of v onto the tangent cone at xbar ∈ C. Throws NotOnSet.
  Vec tangent_project(const Vec& xbar, const Vec& v) const;
  /// ‖P_T(eta)‖; zero iff eta lies in the normal cone at xbar.
  double normal_residual(const Vec& xbar, const Vec& eta) const;

  ProxInfo prox_info() const;

  /// Compact identifier of the active constraints at xbar, one character per
  /// constraint (or a single character for curved sets).
  std::string active_signature(const Vec& xbar) const;

  // Sampling support shared by the lemma suites, grad_bound and the harness.

  /// Bounding box of the part of C used for sampling.
  std::pair<Vec, Vec> sampling_box() const;
  /// A point of C. Mixes interior, face and vertex points where applicable.
  Vec sample_point(Rng& rng) const;
  /// Extreme rays of the normal cone at xbar (unit length). Lines appear as
  /// ± pairs. Empty when the normal cone is {0}.
  std::vector<Vec> normal_generators(const Vec& xbar) const;
  /// Random unit vector of the normal cone at xbar, or zero if N = {0}.
  Vec sample_unit_normal(const Vec& xbar, Rng& rng) const;
  /// A point of C far from x (antipode / opposite corner), used to probe
  /// worst cases of the proximal inequality.
  Vec opposite_point(const Vec& x) const;

 private:
  ConstraintSet(Variant v, int dim) : variant_(std::move(v)), dim_(dim) {}

  Vec project_unchecked(const Vec& x) const;
  void require_on_set(const Vec& xbar) const;

  Variant variant_;
  int dim_;
  Vec feasible_point_;
  std::pair<Vec, Vec> box_;
};

}  // namespace awflow
