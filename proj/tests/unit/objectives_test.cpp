#include <gtest/gtest.h>

#include "awflow/errors.hpp"
#include "awflow/objectives.hpp"
#include "oracles.hpp"

using namespace awflow;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST(Objectives, Examples) {
  const auto q = Objective::quadratic(Mat::Identity(2, 2), Vec::Zero(2));
  EXPECT_DOUBLE_EQ(q.eval(vec({1, 2})), 2.5);
  EXPECT_EQ(q.grad(vec({1, 2})), vec({1, 2}));

  const auto r = Objective::rosenbrock(2);
  EXPECT_EQ(r.eval(vec({1, 1})), 0.0);
  EXPECT_EQ(r.grad(vec({1, 1})), vec({0, 0}));

  const auto p = Objective::nonconvex_poly({{0, 0, -1, 0, 1}, {}});
  EXPECT_EQ(p.grad(vec({0, 3}))(0), 0.0);
  EXPECT_DOUBLE_EQ(p.eval(vec({2, 5})), 16.0 - 4.0);
}

TEST(Objectives, GradientsMatchFiniteDifferences) {
  Mat Q(3, 3);
  Q << 2, 0.5, 0, 0.5, 1, -0.3, 0, -0.3, 4;
  const std::vector<Objective> objs{Objective::quadratic(Q, vec({1, -2, 0.5}), 3.0),
                                    Objective::rosenbrock(3, 10.0),
                                    Objective::nonconvex_poly({{1, 0, -2, 0, 1}, {0, 1}, {0, 0, 0, 0.5}})};
  Rng rng(2);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (const auto& obj : objs) {
    for (int k = 0; k < 100; ++k) {
      const Vec x = vec({u(rng), u(rng), u(rng)});
      const Vec fd = oracle::fd_gradient([&](const Vec& y) { return obj.eval(y); }, x, 1e-5);
      const Vec g = obj.grad(x);
      EXPECT_LE((fd - g).norm(), 1e-6 * (1.0 + g.norm()));
    }
  }
}

TEST(Objectives, RejectsAsymmetricQuadratic) {
  Mat Q(2, 2);
  Q << 1, 1, 0, 1;
  EXPECT_THROW(Objective::quadratic(Q, Vec::Zero(2)), std::invalid_argument);
}

TEST(GradBound, SphereDistanceObjective) {
  const auto obj = Objective::distance_to(vec({2, 0}));
  const auto sphere = ConstraintSet::sphere(vec({0, 0}), 1);
  const double M = grad_bound(obj, sphere, 100.0, 4000, 1);
  EXPECT_LE(M, 1.1 * 3.0 + 1e-12);
  EXPECT_GE(M, 1.1 * 2.999);
}

TEST(GradBound, ConstantObjective) {
  const auto obj = Objective::quadratic(Mat::Zero(2, 2), Vec::Zero(2), 4.0);
  const double M = grad_bound(obj, ConstraintSet::ball(vec({0, 0}), 1), 10.0, 100, 1);
  EXPECT_GT(M, 0.0);
  EXPECT_LE(M, 1e-9);
}

TEST(GradBound, UnitBallNormObjective) {
  const auto obj = Objective::quadratic(Mat::Identity(2, 2), Vec::Zero(2));
  const double M = grad_bound(obj, ConstraintSet::ball(vec({0, 0}), 1), 1e6, 4000, 3);
  EXPECT_NEAR(M, 1.1, 1e-3);
  EXPECT_LE(M, 1.1 * (1.0 + 1e-14) + 1e-12);
}

TEST(GradBound, MonotoneInLevel) {
  const auto obj = Objective::distance_to(vec({2, 0}));
  const auto set = ConstraintSet::sphere(vec({0, 0}), 1);
  double prev = 0.0;
  for (double level : {0.6, 1.0, 2.0, 3.0, 4.5, 10.0}) {
    const double M = grad_bound(obj, set, level, 2000, 9);
    EXPECT_LE(prev, M + 1e-12) << "level " << level;
    prev = M;
  }
}

TEST(GradBound, EmptySublevelThrows) {
  const auto obj = Objective::distance_to(vec({2, 0}));
  EXPECT_THROW(grad_bound(obj, ConstraintSet::ball(vec({0, 0}), 1), 0.1, 500, 1), EmptySublevel);
}
