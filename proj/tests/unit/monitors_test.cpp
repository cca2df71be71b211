#include <gtest/gtest.h>

#include <cmath>

#include "awflow/errors.hpp"
#include "awflow/monitors.hpp"

using namespace awflow;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

std::shared_ptr<const Problem> make_problem(ConstraintSet set, Objective obj) {
  return std::make_shared<const Problem>(Problem{std::move(set), std::move(obj)});
}

// Records x(t) sampled from a closed-form curve.
Trajectory sampled(const ConstraintSet& set, const std::function<Vec(double)>& curve, double dt, int n) {
  Trajectory traj;
  traj.dt_initial = traj.dt_final = dt;
  for (int i = 0; i <= n; ++i) {
    const double t = i * dt;
    const Vec x = curve(t);
    const Vec xbar = set.project(x);
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.projected.push_back(xbar);
    traj.velocities.push_back(Vec::Zero(x.size()));
    traj.active_signature.push_back(set.active_signature(xbar));
  }
  return traj;
}

}  // namespace

TEST(LyapunovMonitor, ConstantTrajectoryHasZeroViolation) {
  const auto p = make_problem(ConstraintSet::ball(vec({0, 0}), 1), Objective::distance_to(vec({2, 0})));
  const auto traj = sampled(p->set, [](double) -> Vec { return vec({0.3, 0.2}); }, 1e-3, 50);
  const auto r = lyapunov_monitor(traj, *p);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.worst_violation, 0.0);
  EXPECT_EQ(r.samples_checked, 50);
}

TEST(LyapunovMonitor, GradientAscentFails) {
  const auto p = make_problem(ConstraintSet::ball(vec({0, 0}), 10), Objective::distance_to(vec({0, 0})));
  // ẋ = +∇Φ = x from a non-critical start.
  const auto traj = sampled(p->set, [](double t) -> Vec { return vec({0.5, 0.5}) * std::exp(t); }, 1e-3, 100);
  const auto r = lyapunov_monitor(traj, *p);
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.worst_violation, 1e-7);
}

TEST(LyapunovMonitor, CompliantRunPasses) {
  const auto p = make_problem(ConstraintSet::sphere(vec({0, 0}), 1), Objective::distance_to(vec({2, 0})));
  const FlowField field(FlowKind::AntiWindup, 0.2, p);
  const auto traj = integrate(field, vec({-0.3, 0.9}), {});
  EXPECT_TRUE(lyapunov_monitor(traj, *p).passed);
}

TEST(DerivativeIdentityMonitor, InteriorSegmentIsChainRule) {
  const auto p = make_problem(ConstraintSet::ball(vec({0, 0}), 10), Objective::distance_to(vec({1, 1})));
  const FlowField field(FlowKind::AntiWindup, 0.5, p);
  IntegrateOptions opt;
  opt.t_end = 3.0;
  const auto traj = integrate(field, vec({-2, 3}), opt);
  const auto r = derivative_identity_monitor(traj, *p, 0.5);
  EXPECT_TRUE(r.passed) << r.worst_violation;
  EXPECT_EQ(r.samples_excluded_kink, 0);
}

TEST(DerivativeIdentityMonitor, BoxSlidingAndStuckVertex) {
  const auto p = make_problem(ConstraintSet::box(vec({0, 0}), vec({1, 1})), Objective::distance_to(vec({3, -2})));
  const FlowField field(FlowKind::AntiWindup, 0.3, p);
  const auto traj = integrate(field, vec({0.2, 0.9}), {});
  const auto r = derivative_identity_monitor(traj, *p, 0.3);
  EXPECT_TRUE(r.passed) << r.worst_violation << " at " << r.worst_time;
  EXPECT_GT(r.samples_checked, 0);
  EXPECT_LE(kink_exclusion_fraction(r), 0.05);
  // Ends stuck at the vertex (1, 0) while x settles outside.
  EXPECT_NEAR((traj.projected.back() - vec({1, 0})).norm(), 0.0, 1e-9);
}

TEST(TubeMonitor, ConvexRunStaysWithinKM) {
  const auto p = make_problem(ConstraintSet::ball(vec({0, 0}), 1), Objective::distance_to(vec({2, 0})));
  const double M = grad_bound(p->objective, p->set, 1e6, 2000, 1);
  for (double K : {0.01, 0.1, 1.0}) {
    const FlowField field(FlowKind::AntiWindup, K, p);
    const Vec x0 = vec({0, 1});
    const auto traj = integrate(field, x0, {});
    EXPECT_TRUE(tube_monitor(traj, p->set, K, M, x0).passed) << "K = " << K;
  }
}

TEST(TubeMonitor, IntervalSteadyStateDistanceIsK) {
  const auto p = make_problem(ConstraintSet::box(vec({0}), vec({1})), Objective::distance_to(vec({-1})));
  const double K = 0.1, dt = 1e-3;
  const FlowField field(FlowKind::AntiWindup, K, p);
  const auto traj = integrate(field, vec({0.5}), {});
  EXPECT_NEAR(p->set.distance(traj.states.back()), K, 2 * dt);
  const double M = grad_bound(p->objective, p->set, 2.0, 1000, 1);
  EXPECT_TRUE(tube_monitor(traj, p->set, K, M, vec({0.5})).passed);
}

TEST(TubeMonitor, InwardGradientKeepsDistanceZero) {
  const auto p = make_problem(ConstraintSet::ball(vec({0, 0}), 1), Objective::distance_to(vec({0, 0})));
  const auto traj = integrate(FlowField(FlowKind::AntiWindup, 0.5, p), vec({0.6, 0.0}), {});
  for (std::size_t i = 0; i < traj.size(); ++i) EXPECT_EQ(p->set.distance(traj.states[i]), 0.0);
}

TEST(InvarianceMonitor, SphereSmallGainPassesLargeGainFails) {
  const auto p = make_problem(ConstraintSet::sphere(vec({0, 0}), 1), Objective::distance_to(vec({2, 0})));
  const double M = grad_bound(p->objective, p->set, 1e6, 4000, 1);
  const double ks = kstar(0.5, M);
  const Vec x0 = vec({-0.8, 0.05});
  const double level = p->objective.eval(p->set.project(x0));

  const auto good = integrate(FlowField(FlowKind::AntiWindup, 0.8 * ks, p), x0, {});
  EXPECT_TRUE(invariance_monitor(good, p->set, p->objective, level).passed);

  // Aimed at the center: the only way out of the tube.
  const auto bad = integrate(FlowField(FlowKind::AntiWindup, 3.0 * ks, p), vec({-0.8, 0.0}), {});
  ASSERT_EQ(bad.status, TrajectoryStatus::TubeExit);
  EXPECT_FALSE(invariance_monitor(bad, p->set, p->objective, level).passed);
}

TEST(InvarianceMonitor, ConvexTubeClauseIsVacuous) {
  const auto p = make_problem(ConstraintSet::ball(vec({0, 0}), 1), Objective::distance_to(vec({2, 0})));
  const auto traj = sampled(p->set, [](double t) -> Vec { return vec({1e6 * t, 0}); }, 1.0, 3);
  EXPECT_TRUE(invariance_monitor(traj, p->set, p->objective, 2.0).passed);
}

TEST(CriticalityMonitor, Examples) {
  const auto interval = make_problem(ConstraintSet::box(vec({0}), vec({1})), Objective::distance_to(vec({-1})));
  const auto t1 = integrate(FlowField(FlowKind::AntiWindup, 0.1, interval), vec({0.5}), {});
  ASSERT_EQ(t1.status, TrajectoryStatus::Converged);
  const auto r1 = criticality_monitor(t1, *interval);
  EXPECT_TRUE(r1.passed);
  EXPECT_EQ(r1.worst_violation, 0.0);

  const auto ball = make_problem(ConstraintSet::ball(vec({0, 0}), 1), Objective::distance_to(vec({2, 0})));
  IntegrateOptions opt;
  opt.t_end = 200.0;
  const auto t2 = integrate(FlowField(FlowKind::AntiWindup, 0.1, ball), vec({0, 1}), opt);
  ASSERT_EQ(t2.status, TrajectoryStatus::Converged);
  EXPECT_TRUE(criticality_monitor(t2, *ball).passed);
  EXPECT_NEAR((t2.projected.back() - vec({1, 0})).norm(), 0.0, 1e-4);

  const auto inner = make_problem(ConstraintSet::ball(vec({0, 0}), 1), Objective::distance_to(vec({0.2, 0.1})));
  const auto t3 = integrate(FlowField(FlowKind::AntiWindup, 0.1, inner), vec({-0.5, 0.5}), opt);
  ASSERT_EQ(t3.status, TrajectoryStatus::Converged);
  const auto r3 = criticality_monitor(t3, *inner);
  EXPECT_TRUE(r3.passed);
  EXPECT_NEAR(r3.worst_violation, inner->objective.grad(t3.projected.back()).norm(), 1e-15);
}

TEST(CriticalityMonitor, RequiresConvergedTrajectory) {
  const auto p = make_problem(ConstraintSet::ball(vec({0, 0}), 1), Objective::distance_to(vec({2, 0})));
  IntegrateOptions opt;
  opt.t_end = 0.01;
  const auto traj = integrate(FlowField(FlowKind::AntiWindup, 0.1, p), vec({0, 1}), opt);
  EXPECT_THROW(criticality_monitor(traj, *p), NotConverged);

  // a penalized equilibrium is at rest; its projection is judged, not rejected
  const auto q = make_problem(ConstraintSet::box(vec({0, 0}), vec({1, 1})),
                              Objective::quadratic((Mat(2, 2) << 2, 0.9, 0.9, 1).finished(), vec({-4, 1})));
  IntegrateOptions eq;
  eq.t_end = 50;
  const auto pen = integrate(FlowField(FlowKind::Penalized, 0.5, q), vec({0.5, 0.5}), eq);
  ASSERT_EQ(pen.status, TrajectoryStatus::Equilibrium);
  const auto r = criticality_monitor(pen, *q);
  const Vec xb = pen.projected.back();
  EXPECT_DOUBLE_EQ(r.worst_violation, q->set.normal_residual(xb, -q->objective.grad(xb)));
}

TEST(Kstar, Examples) {
  EXPECT_DOUBLE_EQ(kstar(0.5, 3.0), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(kstar(0.5, 1.0), 1.0);
  EXPECT_THROW(kstar(0.0, 1.0), NotApplicable);
}

TEST(Monitors, ArePureFunctionsOfTheTrajectory) {
  const auto p = make_problem(ConstraintSet::box(vec({0, 0}), vec({1, 1})), Objective::distance_to(vec({3, -2})));
  const auto traj = integrate(FlowField(FlowKind::AntiWindup, 0.3, p), vec({0.2, 0.9}), {});
  const auto a = derivative_identity_monitor(traj, *p, 0.3);
  const auto b = derivative_identity_monitor(traj, *p, 0.3);
  EXPECT_EQ(a.worst_violation, b.worst_violation);
  EXPECT_EQ(a.worst_time, b.worst_time);
  EXPECT_EQ(a.samples_checked, b.samples_checked);
}
