#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "awflow/geometry.hpp"

namespace awflow {

/// One-sided finite-difference estimate of the directional derivative of the
/// projection map.
struct DirDerivEstimate {
  Vec value;
  double h_used = 0.0;
  double convergence_error = 0.0;  // ‖estimate(h) − estimate(h/2)‖ at the last step
  bool converged = false;
};

/// Forward differences (P(x + h v) − P(x)) / h on h_k = h₀·2^{−k},
/// h₀ = 1e−2/‖v‖, k ≤ 30, stopped by a Cauchy test at `tol`. Non-convergence
/// is reported through the flag, not thrown.
DirDerivEstimate dir_deriv_fd(const ConstraintSet& set, const Vec& x, const Vec& v, double tol);

struct ProximalWitness {
  Vec x;
  Vec y;
  Vec eta;
};

struct AlphaProximalResult {
  bool ok = true;
  double worst_violation = 0.0;  // max of ⟨η, y−x⟩ − α‖η‖‖y−x‖²
  ProximalWitness witness;
};

/// Samples x, y ∈ C and unit normals η at x, including the point of C
/// opposite to x, and evaluates the proximal inequality.
AlphaProximalResult check_alpha_proximal(const ConstraintSet& set, double alpha, int n_samples,
                                         std::uint64_t seed);

struct HypomonotoneResult {
  bool ok = true;
  double worst_value = 0.0;  // min of ⟨η′ − η, x′ − x⟩ + 2α‖x′ − x‖²
  ProximalWitness witness;   // x, y = x′; eta holds η′ − η
};

HypomonotoneResult check_hypomonotone(const ConstraintSet& set, double alpha, int n_samples,
                                      std::uint64_t seed);

struct LemmaChecks {
  Vec vbar;
  double viability_residual = 0.0;
  double monotone_inner = 0.0;
  double orthogonality_residual = 0.0;
  double equivalence_gap = 0.0;
};

/// Evaluates the viability, monotonicity, orthogonality and ⟨v, v̄⟩ = 0 ⇔
/// v̄ = 0 properties of v̄ = D P_C(x; v). Throws NonConvergent when the
/// finite-difference estimate does not settle.
LemmaChecks lemma_checks_along_direction(const ConstraintSet& set, const Vec& x, const Vec& v,
                                         double fd_tol = 1e-7, double inner_tol = 1e-8);

/// Outcome of one sampled property.
struct PropertyResult {
  std::string name;
  bool passed = true;
  double worst = 0.0;      // worst observed value of the checked quantity
  double tolerance = 0.0;  // bound the quantity is compared against
  int checked = 0;
  int excluded = 0;  // non-convergent or kink-adjacent samples
};

struct LemmaSuiteReport {
  std::string set_kind;
  std::vector<PropertyResult> properties;
  bool all_passed() const;
};

/// Runs every geometry and calculus property on `n_samples` sampled points.
LemmaSuiteReport run_lemma_suite(const ConstraintSet& set, int n_samples, std::uint64_t seed);

}  // namespace awflow
