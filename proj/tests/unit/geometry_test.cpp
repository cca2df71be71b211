#include <gtest/gtest.h>

#include <cmath>

#include "awflow/calculus.hpp"
#include "awflow/errors.hpp"
#include "awflow/geometry.hpp"
#include "oracles.hpp"

using namespace awflow;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

ConstraintSet unit_square() { return ConstraintSet::box(vec({0, 0}), vec({1, 1})); }

ConstraintSet simplex3() {
  return ConstraintSet::polyhedron(-Mat::Identity(3, 3), Vec::Zero(3), Mat::Ones(1, 3), Vec::Ones(1));
}

// Complement of the open unit disc: {x | 1 − ‖x‖² ≤ 0}.
ConstraintSet disc_complement() {
  SmoothSublevel s;
  s.g = [](const Vec& x) { return 1.0 - x.squaredNorm(); };
  s.grad = [](const Vec& x) -> Vec { return -2.0 * x; };
  s.alpha = 0.5;
  s.box_lower = vec({-3, -3});
  s.box_upper = vec({3, 3});
  return ConstraintSet::smooth_sublevel(s);
}

}  // namespace

TEST(Geometry, ProjectExamples) {
  EXPECT_EQ(unit_square().project(vec({2, 0.5})), vec({1, 0.5}));
  EXPECT_NEAR((ConstraintSet::ball(vec({0, 0}), 1).project(vec({3, 4})) - vec({0.6, 0.8})).norm(), 0.0,
              1e-15);
  EXPECT_THROW(ConstraintSet::sphere(vec({0, 0}), 1).project(vec({0, 0})), AmbiguousProjection);
}

TEST(Geometry, SimplexProjectionMatchesOracle) {
  const auto set = simplex3();
  const Vec x = vec({2, 0, 0});
  const Vec oracle_value = oracle::simplex_projection(x);
  EXPECT_NEAR((oracle_value - vec({1, 0, 0})).norm(), 0.0, 1e-15);
  EXPECT_NEAR((set.project(x) - oracle_value).norm(), 0.0, 1e-12);

  // Coarse grid minimization confirms the oracle value.
  double best = 1e300;
  Vec best_y;
  for (int i = 0; i <= 200; ++i) {
    for (int j = 0; i + j <= 200; ++j) {
      const Vec y = vec({i / 200.0, j / 200.0, 1.0 - (i + j) / 200.0});
      if ((y - x).squaredNorm() < best) best = (y - x).squaredNorm(), best_y = y;
    }
  }
  EXPECT_NEAR((best_y - vec({1, 0, 0})).norm(), 0.0, 1e-12);
}

TEST(Geometry, DistanceExamples) {
  EXPECT_NEAR(unit_square().distance(vec({2, 2})), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(unit_square().distance(vec({0.3, 0.9})), 0.0);
  EXPECT_EQ(ConstraintSet::sphere(vec({0, 0}), 1).distance(vec({0, 0})), 1.0);
  EXPECT_NEAR(simplex3().distance(vec({0.2, 0.3, 0.5})), 0.0, 1e-15);
}

TEST(Geometry, SphereAmbiguityBand) {
  const auto s = ConstraintSet::sphere(vec({0, 0}), 2.0);
  EXPECT_THROW(s.project(vec({1e-8, 0})), AmbiguousProjection);
  EXPECT_NO_THROW(s.project(vec({1e-6, 0})));
  // Outside the tube on the far side as well.
  EXPECT_THROW(s.project(vec({4.5, 0})), AmbiguousProjection);
}

TEST(Geometry, TangentProjectExamples) {
  EXPECT_EQ(unit_square().tangent_project(vec({1, 0.5}), vec({1, 1})), vec({0, 1}));
  EXPECT_EQ(unit_square().tangent_project(vec({0.5, 0.5}), vec({-3, 7})), vec({-3, 7}));
  EXPECT_NEAR((ConstraintSet::sphere(vec({0, 0}), 1).tangent_project(vec({1, 0}), vec({2, 3})) - vec({0, 3})).norm(),
              0.0, 1e-15);
  EXPECT_THROW(unit_square().tangent_project(vec({1.5, 0.5}), vec({1, 0})), NotOnSet);
}

TEST(Geometry, NormalResidualExamples) {
  EXPECT_EQ(unit_square().normal_residual(vec({0, 0.5}), vec({-3, 0})), 0.0);
  EXPECT_NEAR(unit_square().normal_residual(vec({0.5, 0.5}), vec({3, 4})), 5.0, 1e-15);
  EXPECT_NEAR(ConstraintSet::sphere(vec({0, 0}), 1).normal_residual(vec({1, 0}), vec({5, 0})), 0.0, 1e-15);
}

TEST(Geometry, PolyhedronTangentConeAtVertex) {
  // Vertex (1,0,0) of the simplex: active x2 ≥ 0, x3 ≥ 0 and the equality.
  const auto set = simplex3();
  const Vec w = set.tangent_project(vec({1, 0, 0}), vec({1, 1, -1}));
  EXPECT_NEAR(w.sum(), 0.0, 1e-12);
  EXPECT_GE(w(1), -1e-12);
  EXPECT_GE(w(2), -1e-12);
  EXPECT_NEAR(w.dot(vec({1, 1, -1}) - w), 0.0, 1e-12);
}

TEST(Geometry, ProxInfoExamples) {
  const auto ball = ConstraintSet::ball(vec({0, 0}), 1).prox_info();
  EXPECT_EQ(ball.alpha, 0.0);
  EXPECT_TRUE(std::isinf(ball.safe_radius));
  const auto s1 = ConstraintSet::sphere(vec({0, 0}), 1).prox_info();
  EXPECT_EQ(s1.alpha, 0.5);
  EXPECT_EQ(s1.safe_radius, 1.0);
  const auto s2 = ConstraintSet::sphere(vec({0, 0}), 2).prox_info();
  EXPECT_EQ(s2.alpha, 0.25);
  EXPECT_EQ(s2.safe_radius, 2.0);
}

TEST(Geometry, SphereProxConstantByDenseSampling) {
  // Independent check of alpha = 1/(2r): ⟨η, y − x⟩ ≤ α‖η‖‖y − x‖² on a
  // dense angular grid with η = ±(x − c).
  for (double r : {1.0, 2.0}) {
    const double alpha = 1.0 / (2.0 * r);
    double worst = -1e300;
    for (int i = 0; i < 360; ++i) {
      for (int j = 0; j < 360; ++j) {
        const double a = 2 * M_PI * i / 360, b = 2 * M_PI * j / 360;
        const Vec x = r * vec({std::cos(a), std::sin(a)});
        const Vec y = r * vec({std::cos(b), std::sin(b)});
        for (double sign : {1.0, -1.0}) {
          const Vec eta = sign * x / r;
          worst = std::max(worst, eta.dot(y - x) - alpha * (y - x).squaredNorm());
        }
      }
    }
    EXPECT_LE(worst, 1e-12) << "r = " << r;
  }
  // Unit sphere equality case ⟨−x, y − x⟩ = ½‖y − x‖².
  const Vec x = vec({0.6, 0.8}), y = vec({-1, 0});
  EXPECT_NEAR((-x).dot(y - x), 0.5 * (y - x).squaredNorm(), 1e-15);
}

TEST(Geometry, InvalidConstructionsAreRejected) {
  EXPECT_THROW(ConstraintSet::box(vec({1, 0}), vec({0, 1})), std::invalid_argument);
  EXPECT_THROW(ConstraintSet::ball(vec({0, 0}), 0.0), std::invalid_argument);
  EXPECT_THROW(ConstraintSet::sphere(vec({0, 0}), -1.0), std::invalid_argument);
  Mat A(2, 1);
  A << 1, -1;
  EXPECT_THROW(ConstraintSet::polyhedron(A, vec({0, -1})), InfeasibleSet);
}

TEST(Geometry, PolyhedronSamplingBoxIsExactForBoundedSets) {
  const auto [lo, hi] = simplex3().sampling_box();
  EXPECT_NEAR((lo - Vec::Zero(3)).norm(), 0.0, 1e-9);
  EXPECT_NEAR((hi - Vec::Ones(3)).norm(), 0.0, 1e-9);
}

TEST(Geometry, SmoothSublevelProjection) {
  const auto set = disc_complement();
  EXPECT_EQ(set.prox_info().alpha, 0.5);
  EXPECT_EQ(set.prox_info().safe_radius, 1.0);
  EXPECT_EQ(set.project(vec({2, 0})), vec({2, 0}));
  EXPECT_NEAR((set.project(vec({0.3, 0.4})) - vec({0.6, 0.8})).norm(), 0.0, 1e-12);
  EXPECT_THROW(set.project(vec({0, 0})), ProjectionNoConverge);
  EXPECT_NEAR(set.normal_residual(vec({0.6, 0.8}), vec({-0.6, -0.8})), 0.0, 1e-12);
}

TEST(Geometry, SmoothSublevelRejectsOptimisticAlpha) {
  SmoothSublevel s;
  s.g = [](const Vec& x) { return 1.0 - x.squaredNorm(); };
  s.grad = [](const Vec& x) -> Vec { return -2.0 * x; };
  s.alpha = 0.1;  // true constant is 0.5
  s.box_lower = vec({-3, -3});
  s.box_upper = vec({3, 3});
  EXPECT_THROW(ConstraintSet::smooth_sublevel(s), std::invalid_argument);
}

// Property checks at unit-test scale; the acceptance suite repeats them on
// 10^3 samples per set.
TEST(GeometryProperties, IdempotenceAndResidualNormality) {
  const std::vector<ConstraintSet> sets{unit_square(), simplex3(),
                                        ConstraintSet::ball(vec({1, -1, 0}), 1.5),
                                        ConstraintSet::sphere(vec({0, 0}), 1), disc_complement()};
  for (const auto& set : sets) {
    Rng rng(21);
    std::normal_distribution<double> nd;
    const ProxInfo info = set.prox_info();
    int checked = 0;
    for (int i = 0; i < 300; ++i) {
      const Vec xbar = set.sample_point(rng);
      const Vec eta = set.sample_unit_normal(xbar, rng);
      const double reach = std::isinf(info.safe_radius) ? 2.0 : 0.9 * info.safe_radius;
      const Vec y = xbar + reach * std::uniform_real_distribution<double>()(rng) * eta;
      const Vec p = set.project(y);
      EXPECT_LE((set.project(p) - p).norm(), 1e-10) << set.kind_name();
      EXPECT_LE(set.normal_residual(p, y - p), 1e-8) << set.kind_name();
      EXPECT_LE((p - xbar).norm(), 1e-8) << set.kind_name();  // preimage identity
      ++checked;
    }
    EXPECT_EQ(checked, 300);
  }
}

TEST(GeometryProperties, ConvexProjectionsAreNonexpansiveAndMonotone) {
  const std::vector<ConstraintSet> sets{unit_square(), simplex3(), ConstraintSet::ball(vec({0, 0, 0}), 1)};
  for (const auto& set : sets) {
    Rng rng(4);
    std::normal_distribution<double> nd(0.0, 2.0);
    const int n = set.dimension();
    for (int i = 0; i < 500; ++i) {
      Vec y1(n), y2(n);
      for (int k = 0; k < n; ++k) y1(k) = nd(rng), y2(k) = nd(rng);
      const Vec p1 = set.project(y1), p2 = set.project(y2);
      EXPECT_LE((p1 - p2).norm(), (1.0 + 1e-10) * (y1 - y2).norm());
      EXPECT_GE((p1 - p2).dot(y1 - y2), -1e-10);
    }
  }
}

TEST(GeometryProperties, SquaredDistanceGradient) {
  const auto set = ConstraintSet::sphere(vec({0.5, 0}), 1.0);
  Rng rng(9);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int i = 0; i < 200; ++i) {
    const Vec x = vec({0.5 + u(rng), u(rng)});
    if (set.distance(x) >= 0.9) continue;
    const auto d2 = [&](const Vec& y) { return std::pow(set.distance(y), 2); };
    EXPECT_LE((oracle::fd_gradient(d2, x, 1e-5) - 2.0 * (x - set.project(x))).norm(), 1e-5);
  }
}
