#include <gtest/gtest.h>

#include <cmath>

#include "awflow/errors.hpp"
#include "awflow/flows.hpp"

using namespace awflow;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

std::shared_ptr<const Problem> unit_interval(const Objective& obj) {
  return std::make_shared<const Problem>(Problem{ConstraintSet::box(vec({0}), vec({1})), obj});
}

// ½(x + 1)²
Objective shifted_square() { return Objective::distance_to(vec({-1})); }

// Closed-form solution of ẋ = −∇Φ(P(x)) − (x − P(x))/K for Φ = ½(x+1)² on
// [0,1] from x0 ∈ (0,1]: exponential decay to the boundary, then relaxation to −K.
double interval_solution(double x0, double K, double t) {
  const double t1 = std::log(1.0 + x0);
  if (t <= t1) return -1.0 + (1.0 + x0) * std::exp(-t);
  return -K + K * std::exp(-(t - t1) / K);
}

}  // namespace

TEST(Fields, Examples) {
  const auto linear = unit_interval(Objective::nonconvex_poly({{0, 1}}));
  EXPECT_NEAR(aw_field(*linear, 0.1, vec({-0.05}))(0), -0.5, 1e-15);
  EXPECT_EQ(aw_field(*linear, 0.1, vec({0.5}))(0), -1.0);

  const auto p = unit_interval(shifted_square());
  EXPECT_NEAR(aw_field(*p, 0.1, vec({-0.1}))(0), 0.0, 1e-15);
  EXPECT_EQ(p->set.project(vec({-0.1}))(0), 0.0);
  EXPECT_NEAR(penalty_field(*p, 1.0, vec({-0.5}))(0), 0.0, 1e-15);
}

TEST(Fields, AgreeOnSetAndDifferByGradientGap) {
  Mat Q(2, 2);
  Q << 3, 1, 1, 2;
  const Problem p{ConstraintSet::ball(vec({0, 0}), 1), Objective::quadratic(Q, vec({-4, 1}))};
  Rng rng(1);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 200; ++i) {
    const Vec y = vec({u(rng), u(rng)});
    const Vec on = p.set.project(y);
    EXPECT_LE((aw_field(p, 0.3, on) + p.objective.grad(on)).norm(), 1e-12);
    EXPECT_LE((penalty_field(p, 0.3, on) + p.objective.grad(on)).norm(), 1e-12);
    const Vec gap = aw_field(p, 0.3, y) - penalty_field(p, 0.3, y);
    EXPECT_LE((gap - (p.objective.grad(y) - p.objective.grad(on))).norm(), 1e-12);
  }
}

TEST(Fields, RejectNonPositiveGain) {
  EXPECT_THROW(FlowField(FlowKind::AntiWindup, 0.0, unit_interval(shifted_square())),
               std::invalid_argument);
}

TEST(Integrate, IntervalMatchesClosedForm) {
  const FlowField field(FlowKind::AntiWindup, 0.1, unit_interval(shifted_square()));
  const auto traj = integrate(field, vec({0.5}), {});
  EXPECT_EQ(traj.status, TrajectoryStatus::Converged);
  EXPECT_NEAR(traj.states.back()(0), -0.1, 1e-8);
  EXPECT_EQ(traj.projected.back()(0), 0.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    worst = std::max(worst, std::abs(traj.states[i](0) - interval_solution(0.5, 0.1, traj.times[i])));
  }
  EXPECT_LE(worst, 1e-4);
  for (std::size_t i = 1; i < traj.size(); ++i) EXPECT_GT(traj.times[i], traj.times[i - 1]);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    EXPECT_LE((traj.projected[i] - field.problem().set.project(traj.states[i])).norm(), 1e-9);
  }
}

TEST(Integrate, EquilibriumStartConvergesImmediately) {
  const FlowField field(FlowKind::AntiWindup, 0.1, unit_interval(shifted_square()));
  const auto traj = integrate(field, vec({-0.1}), {});
  EXPECT_EQ(traj.status, TrajectoryStatus::Converged);
  EXPECT_LE(traj.size(), 11u);
  for (const auto& x : traj.states) EXPECT_NEAR(x(0), -0.1, 1e-15);
}

TEST(Integrate, PenalizedFlowReachesItsOwnEquilibrium) {
  const FlowField field(FlowKind::Penalized, 1.0, unit_interval(shifted_square()));
  IntegrateOptions opt;
  opt.t_end = 60.0;
  const auto traj = integrate(field, vec({0.5}), opt);
  EXPECT_EQ(traj.status, TrajectoryStatus::Equilibrium);
  EXPECT_NEAR(traj.states.back()(0), -0.5, 1e-7);
}

TEST(Integrate, EquilibriumIsCritical) {
  Mat Q(2, 2);
  Q << 2, 0.6, 0.6, 1;
  auto p = std::make_shared<const Problem>(
      Problem{ConstraintSet::box(vec({0, 0}), vec({1, 1})), Objective::quadratic(Q, vec({1, -3}))});
  const FlowField field(FlowKind::AntiWindup, 0.2, p);
  const auto traj = integrate(field, vec({0.9, 0.1}), {});
  ASSERT_EQ(traj.status, TrajectoryStatus::Converged);
  const Vec x = traj.states.back();
  EXPECT_LE(aw_field(*p, 0.2, x).norm(), 1e-8);
  const Vec xbar = p->set.project(x);
  EXPECT_LE(p->set.normal_residual(xbar, -p->objective.grad(xbar)), 1e-5);
}

TEST(Integrate, RefinementIsFourthOrderOnInteriorRun) {
  // ẋ = −x stays inside the ball, so the field is smooth along the run.
  auto p = std::make_shared<const Problem>(
      Problem{ConstraintSet::ball(vec({0, 0}), 10), Objective::distance_to(vec({0, 0}))});
  const FlowField field(FlowKind::AntiWindup, 1.0, p);
  const Vec x0 = vec({1, -2});
  const Vec exact = x0 * std::exp(-1.0);
  std::vector<double> err;
  for (double dt : {0.1, 0.05, 0.025}) {
    IntegrateOptions opt;
    opt.dt = dt;
    opt.t_end = 1.0;
    const auto traj = integrate(field, x0, opt);
    ASSERT_NEAR(traj.times.back(), 1.0, 1e-12);
    err.push_back((traj.states.back() - exact).norm());
  }
  EXPECT_NEAR(err[0] / err[1], 16.0, 1.5);
  EXPECT_NEAR(err[1] / err[2], 16.0, 1.5);
}

TEST(Integrate, LyapunovIncreaseHalvesStep) {
  auto p = std::make_shared<const Problem>(Problem{ConstraintSet::ball(vec({0}), 10),
                                                   Objective::quadratic(Mat::Constant(1, 1, 100.0), Vec::Zero(1))});
  const FlowField field(FlowKind::AntiWindup, 1.0, p);
  IntegrateOptions opt;
  opt.dt = 0.05;  // outside the RK4 stability interval for rate 100
  opt.t_end = 2.0;
  const auto traj = integrate(field, vec({1.0}), opt);
  EXPECT_EQ(traj.halvings, 1);
  EXPECT_EQ(traj.dt_final, 0.025);
  EXPECT_EQ(traj.status, TrajectoryStatus::Converged);
}

TEST(Integrate, SphereLargeGainLeavesTube) {
  auto p = std::make_shared<const Problem>(
      Problem{ConstraintSet::sphere(vec({0, 0}), 1), Objective::distance_to(vec({2, 0}))});
  const FlowField field(FlowKind::AntiWindup, 1.0, p);
  bool exited = false;
  for (double y : {0.0, 0.05, -0.05}) {
    const auto traj = integrate(field, vec({-0.8, y}), {});
    if (traj.status == TrajectoryStatus::TubeExit) {
      exited = true;
      ASSERT_TRUE(traj.exit_state.has_value());
    }
  }
  EXPECT_TRUE(exited);
}

TEST(Integrate, OverflowThrowsNonFiniteState) {
  // −∇Φ = 4x³ blows up in finite time.
  auto p = std::make_shared<const Problem>(
      Problem{ConstraintSet::ball(vec({0}), 1e300), Objective::nonconvex_poly({{0, 0, 0, 0, -1}})});
  const FlowField field(FlowKind::AntiWindup, 1.0, p);
  IntegrateOptions opt;
  opt.dt = 1e-2;
  EXPECT_THROW(integrate(field, vec({10.0}), opt), NonFiniteState);
}

TEST(PgfReference, Examples) {
  const Problem ball{ConstraintSet::ball(vec({0, 0}), 1), Objective::distance_to(vec({2, 0}))};
  const auto stay = pgf_reference(ball, vec({1, 0}), 1e-3, 1.0);
  for (const auto& x : stay.projected) EXPECT_NEAR((x - vec({1, 0})).norm(), 0.0, 1e-15);

  const auto go = pgf_reference(ball, vec({0, 1}), 1e-3, 20.0);
  EXPECT_NEAR((go.projected.back() - vec({1, 0})).norm(), 0.0, 1e-6);
  for (const auto& x : go.projected) EXPECT_TRUE(ball.set.contains(x));

  const Problem interval{ConstraintSet::box(vec({0}), vec({1})), shifted_square()};
  const auto down = pgf_reference(interval, vec({1}), 1e-3, 5.0);
  for (std::size_t i = 1; i < down.size(); ++i) EXPECT_LE(down.projected[i](0), down.projected[i - 1](0));
  EXPECT_EQ(down.projected.back()(0), 0.0);
  EXPECT_EQ(down.size(), 5001u);
}
