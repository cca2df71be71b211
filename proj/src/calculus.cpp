#include "awflow/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "awflow/errors.hpp"

namespace awflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vec unit_gaussian(int n, Rng& rng) {
  std::normal_distribution<double> nd;
  Vec v(n);
  do {
    for (int i = 0; i < n; ++i) v(i) = nd(rng);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

// Radius of the tube used for sampling points off the set. Convex sets have
// no finite safe radius; use the size of their sampling box instead.
double tube_radius(const ConstraintSet& set) {
  const ProxInfo info = set.prox_info();
  if (info.alpha > 0.0) return 0.9 * info.safe_radius;
  const auto [lo, hi] = set.sampling_box();
  return std::max(1.0, (hi - lo).norm());
}

struct TubeSample {
  Vec xbar;
  Vec x;
};

TubeSample sample_tube(const ConstraintSet& set, Rng& rng) {
  TubeSample s;
  s.xbar = set.sample_point(rng);
  const Vec eta = set.sample_unit_normal(s.xbar, rng);
  s.x = s.xbar + uniform(rng, 0.0, tube_radius(set)) * eta;
  return s;
}

// Uniform point in the sampling box inflated by a factor of two.
Vec sample_ambient(const ConstraintSet& set, Rng& rng) {
  const auto [lo, hi] = set.sampling_box();
  const Vec mid = 0.5 * (lo + hi);
  const Vec half = (hi - lo).cwiseMax(1.0);
  Vec x(set.dimension());
  for (int i = 0; i < x.size(); ++i) x(i) = uniform(rng, mid(i) - half(i), mid(i) + half(i));
  return x;
}

// Mix of random, normal and tangential directions so that both sides of the
// ⟨v, v̄⟩ = 0 equivalence get exercised.
Vec sample_direction(const ConstraintSet& set, const Vec& xbar, Rng& rng) {
  const int n = set.dimension();
  const double u = uniform(rng);
  if (u < 0.2) {
    const Vec eta = set.sample_unit_normal(xbar, rng);
    if (eta.norm() > 0.0) return eta;
  } else if (u < 0.4) {
    const Vec w = set.tangent_project(xbar, unit_gaussian(n, rng));
    if (w.norm() > 1e-6) return w / w.norm();
  }
  return unit_gaussian(n, rng);
}

PropertyResult make_property(std::string name, double tolerance) {
  PropertyResult p;
  p.name = std::move(name);
  p.tolerance = tolerance;
  p.worst = -kInf;
  return p;
}

void finish(PropertyResult& p) {
  if (p.checked == 0) p.worst = 0.0;
  p.passed = p.worst <= p.tolerance;
}

}  // namespace

DirDerivEstimate dir_deriv_fd(const ConstraintSet& set, const Vec& x, const Vec& v, double tol) {
  const double vn = v.norm();
  if (!(vn > 0.0)) throw std::invalid_argument("dir_deriv_fd: direction must be nonzero");
  const Vec px = set.project(x);

  auto quotient = [&](double h) -> std::optional<Vec> {
    try {
      return Vec((set.project(x + h * v) - px) / h);
    } catch (const AmbiguousProjection&) {
      return std::nullopt;
    }
  };

  double h = 1e-2 / vn;
  std::optional<Vec> prev = quotient(h);
  DirDerivEstimate est;
  est.convergence_error = kInf;
  for (int k = 1; k <= 30; ++k) {
    h *= 0.5;
    std::optional<Vec> cur = quotient(h);
    if (!cur) continue;
    est.value = *cur;
    est.h_used = h;
    if (prev) {
      est.convergence_error = (*cur - *prev).norm();
      if (est.convergence_error <= tol) {
        est.converged = true;
        return est;
      }
    }
    prev = std::move(cur);
  }
  if (est.value.size() == 0) throw AmbiguousProjection("dir_deriv_fd: no admissible step size");
  return est;
}

AlphaProximalResult check_alpha_proximal(const ConstraintSet& set, double alpha, int n_samples,
                                         std::uint64_t seed) {
  if (!(alpha > 0.0)) throw std::invalid_argument("check_alpha_proximal: alpha must be positive");
  Rng rng(seed);
  AlphaProximalResult res;
  res.worst_violation = -kInf;
  for (int i = 0; i < n_samples; ++i) {
    const Vec x = set.sample_point(rng);
    std::vector<Vec> etas = set.normal_generators(x);
    if (etas.empty()) continue;  // N = {0}: inequality holds trivially
    etas.push_back(set.sample_unit_normal(x, rng));
    const Vec ys[2] = {set.sample_point(rng), set.opposite_point(x)};
    for (const Vec& eta : etas) {
      for (const Vec& y : ys) {
        const Vec d = y - x;
        const double viol = eta.dot(d) - alpha * eta.norm() * d.squaredNorm();
        if (viol > res.worst_violation) {
          res.worst_violation = viol;
          res.witness = {x, y, eta};
        }
      }
    }
  }
  if (res.worst_violation == -kInf) res.worst_violation = 0.0;
  res.ok = res.worst_violation <= 1e-9;
  return res;
}

HypomonotoneResult check_hypomonotone(const ConstraintSet& set, double alpha, int n_samples,
                                      std::uint64_t seed) {
  Rng rng(seed);
  HypomonotoneResult res;
  res.worst_value = kInf;
  const int n = set.dimension();

  // Candidate normals in N_x ∩ B: zero, the extreme rays, and a random
  // scaled element.
  auto candidates = [&](const Vec& x) {
    std::vector<Vec> etas{Vec::Zero(n)};
    for (const Vec& g : set.normal_generators(x)) etas.push_back(g);
    etas.push_back(uniform(rng) * set.sample_unit_normal(x, rng));
    return etas;
  };

  for (int i = 0; i < n_samples; ++i) {
    const Vec x = set.sample_point(rng);
    const Vec xp = (i % 2 == 0) ? set.opposite_point(x) : set.sample_point(rng);
    const auto etas = candidates(x);
    const auto etaps = candidates(xp);
    const Vec dx = xp - x;
    for (const Vec& eta : etas) {
      for (const Vec& etap : etaps) {
        const double value = (etap - eta).dot(dx) + 2.0 * alpha * dx.squaredNorm();
        if (value < res.worst_value) {
          res.worst_value = value;
          res.witness = {x, xp, etap - eta};
        }
      }
    }
  }
  if (res.worst_value == kInf) res.worst_value = 0.0;
  res.ok = res.worst_value >= -1e-9;
  return res;
}

LemmaChecks lemma_checks_along_direction(const ConstraintSet& set, const Vec& x, const Vec& v,
                                         double fd_tol, double inner_tol) {
  const DirDerivEstimate est = dir_deriv_fd(set, x, v, fd_tol);
  if (!est.converged) {
    throw NonConvergent("directional derivative estimate did not converge (error " +
                        std::to_string(est.convergence_error) + ")");
  }
  const Vec xbar = set.project(x);
  LemmaChecks c;
  c.vbar = est.value;
  c.viability_residual = (c.vbar - set.tangent_project(xbar, c.vbar)).norm();
  c.monotone_inner = v.dot(c.vbar);
  c.orthogonality_residual = std::abs(c.vbar.dot(x - xbar));
  c.equivalence_gap = std::abs(c.monotone_inner) <= inner_tol ? c.vbar.norm() : 0.0;
  return c;
}

bool LemmaSuiteReport::all_passed() const {
  return std::all_of(properties.begin(), properties.end(),
                     [](const PropertyResult& p) { return p.passed; });
}

LemmaSuiteReport run_lemma_suite(const ConstraintSet& set, int n_samples, std::uint64_t seed) {
  LemmaSuiteReport report;
  report.set_kind = std::string(set.kind_name());
  const int n = set.dimension();
  const ProxInfo info = set.prox_info();
  const bool convex = set.is_convex();
  Rng rng(seed);

  // Geometry properties.
  auto idem = make_property("idempotence", 1e-10);
  auto preimage = make_property("preimage_identity", 1e-8);
  auto normality = make_property("residual_normality", 1e-8);
  auto lipschitz = make_property("lipschitz_ratio", convex ? 1.0 + 1e-10 : 1.0 + 1e-6);
  auto monotone = make_property("projection_monotonicity", 1e-10);
  auto dist_grad = make_property("distance_gradient", 1e-5);

  for (int i = 0; i < n_samples; ++i) {
    const TubeSample s = sample_tube(set, rng);
    const Vec px = set.project(s.x);

    idem.worst = std::max(idem.worst, (set.project(px) - px).norm());
    ++idem.checked;

    const Vec eta = set.sample_unit_normal(s.xbar, rng);
    const Vec offset = uniform(rng, 0.0, tube_radius(set)) * eta;
    if (set.normal_residual(s.xbar, offset) <= 1e-12 * (1.0 + offset.norm())) {
      preimage.worst = std::max(preimage.worst, (set.project(s.xbar + offset) - s.xbar).norm());
      ++preimage.checked;
    } else {
      ++preimage.excluded;
    }

    normality.worst = std::max(normality.worst, set.normal_residual(px, s.x - px));
    ++normality.checked;

    {
      const double delta = (i % 2 == 0) ? 1e-3 : 1e-1;
      const Vec y2 = s.x + delta * unit_gaussian(n, rng);
      try {
        const Vec p2 = set.project(y2);
        const double ratio = (px - p2).norm() / (s.x - y2).norm();
        double bound = 1.0;
        if (!convex) {
          const double dmax = std::max(set.distance(s.x), set.distance(y2)) + delta;
          const double denom = 1.0 - 2.0 * info.alpha * dmax;
          if (denom <= 0.0) throw AmbiguousProjection("pair leaves the tube");
          bound = 1.0 / denom;
        }
        lipschitz.worst = std::max(lipschitz.worst, ratio / bound);
        ++lipschitz.checked;
      } catch (const AmbiguousProjection&) {
        ++lipschitz.excluded;
      }
    }

    if (convex) {
      const Vec y1 = sample_ambient(set, rng);
      const Vec y2 = sample_ambient(set, rng);
      const double inner = (set.project(y1) - set.project(y2)).dot(y1 - y2);
      monotone.worst = std::max(monotone.worst, -inner);
      ++monotone.checked;
    }

    {
      const double h = 1e-5;
      const std::string sig = set.active_signature(px);
      const Vec grad = 2.0 * (s.x - px);
      Vec fd(n);
      bool constant = true;
      for (int k = 0; k < n && constant; ++k) {
        Vec xp = s.x, xm = s.x;
        xp(k) += h;
        xm(k) -= h;
        try {
          const Vec pp = set.project(xp), pm = set.project(xm);
          constant = set.active_signature(pp) == sig && set.active_signature(pm) == sig;
          fd(k) = ((xp - pp).squaredNorm() - (xm - pm).squaredNorm()) / (2.0 * h);
        } catch (const AmbiguousProjection&) {
          constant = false;
        }
      }
      if (constant) {
        dist_grad.worst = std::max(dist_grad.worst, (fd - grad).norm());
        ++dist_grad.checked;
      } else {
        ++dist_grad.excluded;
      }
    }
  }
  for (auto* p : {&idem, &preimage, &normality, &lipschitz, &monotone, &dist_grad}) {
    if (p == &monotone && !convex) continue;
    finish(*p);
    report.properties.push_back(*p);
  }

  // Proximal inequality and hypomonotonicity at the set's own constant.
  {
    const double alpha = info.alpha > 0.0 ? info.alpha : 1e-6;
    const auto prox = check_alpha_proximal(set, alpha, n_samples, seed + 1);
    auto p = make_property("alpha_proximal", 1e-9);
    p.worst = prox.worst_violation;
    p.checked = n_samples;
    finish(p);
    report.properties.push_back(p);

    const auto hypo = check_hypomonotone(set, info.alpha, n_samples, seed + 2);
    auto q = make_property("hypomonotone_normals", 1e-9);
    q.worst = -hypo.worst_value;
    q.checked = n_samples;
    finish(q);
    report.properties.push_back(q);
  }
  if (std::holds_alternative<Sphere>(set.variant())) {
    // Sharpness: a slightly smaller constant must fail, witnessed by an
    // antipodal pair.
    const auto prox = check_alpha_proximal(set, 0.8 * info.alpha, n_samples, seed + 3);
    auto p = make_property("alpha_proximal_sharp", 1e-9);
    const double antipodal_gap =
        (prox.witness.y - set.opposite_point(prox.witness.x)).norm();
    // Quantity is ≤ 0 exactly when the check fails at an antipodal witness.
    p.worst = prox.ok ? 1.0 : antipodal_gap - 1e-9;
    p.tolerance = 0.0;
    p.checked = n_samples;
    finish(p);
    report.properties.push_back(p);
  }

  // Directional derivative properties.
  auto l5 = make_property("dirderiv_equals_tangent_projection", 1e-5);
  auto l6 = make_property("dirderiv_viability", 1e-5);
  auto l7 = make_property("dirderiv_monotone", 1e-7);
  auto l8 = make_property("dirderiv_orthogonality", 1e-5);
  auto l9 = make_property("dirderiv_zero_inner_implies_zero", 1e-4);
  auto l10 = make_property("convex_everywhere_consolidation", 0.0);

  auto record_checks = [&](const Vec& x, const Vec& v, PropertyResult* all_in_one) {
    try {
      const LemmaChecks c = lemma_checks_along_direction(set, x, v);
      const double d = set.distance(x);
      const double orth = c.orthogonality_residual / (1.0 + d);
      const double gap = c.monotone_inner <= 1e-8 ? c.vbar.norm() : 0.0;
      if (all_in_one) {
        // Largest ratio of each residual to its tolerance, shifted so that
        // passing means ≤ 0.
        const double worst = std::max({c.viability_residual / 1e-5, -c.monotone_inner / 1e-7,
                                       orth / 1e-5, gap / 1e-4}) - 1.0;
        all_in_one->worst = std::max(all_in_one->worst, worst);
        ++all_in_one->checked;
        return;
      }
      l6.worst = std::max(l6.worst, c.viability_residual);
      l7.worst = std::max(l7.worst, -c.monotone_inner);
      l8.worst = std::max(l8.worst, orth);
      l9.worst = std::max(l9.worst, gap);
      ++l6.checked, ++l7.checked, ++l8.checked, ++l9.checked;
    } catch (const NonConvergent&) {
      auto* target = all_in_one;
      if (target) {
        ++target->excluded;
      } else {
        ++l6.excluded, ++l7.excluded, ++l8.excluded, ++l9.excluded;
      }
    }
  };

  for (int i = 0; i < n_samples; ++i) {
    const Vec xbar = set.sample_point(rng);
    const Vec v = sample_direction(set, xbar, rng);
    const DirDerivEstimate est = dir_deriv_fd(set, xbar, v, 1e-7);
    if (est.converged) {
      l5.worst = std::max(l5.worst, (est.value - set.tangent_project(xbar, v)).norm());
      ++l5.checked;
    } else {
      ++l5.excluded;
    }

    const TubeSample s = sample_tube(set, rng);
    record_checks(s.x, sample_direction(set, set.project(s.x), rng), nullptr);

    if (convex) record_checks(sample_ambient(set, rng), unit_gaussian(n, rng), &l10);
  }
  for (auto* p : {&l5, &l6, &l7, &l8, &l9, &l10}) {
    if (p == &l10 && !convex) continue;
    finish(*p);
    report.properties.push_back(*p);
  }
  return report;
}

}  // namespace awflow
