#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "awflow/types.hpp"

namespace awflow {

/// One quantity checked by a criterion. `upper`: passes iff value ≤
/// threshold; otherwise passes iff value > threshold.
struct Measure {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool upper = true;
  bool continuous = true;  // residual or deviation; counts are not

  bool passed() const { return upper ? value <= threshold : value > threshold; }
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = true;
  std::vector<Measure> measures;
  std::string detail;
};

struct AcceptanceReport {
  std::uint64_t seed = 0;
  std::vector<CriterionResult> criteria;

  bool all_passed() const;
  std::string to_json() const;
};

struct AcceptanceOptions {
  std::vector<int> criteria{1, 2, 3, 4, 5, 6, 7, 8};
  /// Test mode: every threshold of this criterion is replaced by one no
  /// measurement can meet.
  std::optional<int> corrupt_criterion;
  /// Where report.json and the tube-exit witness go; empty writes nothing.
  std::string output_dir;
  int lemma_samples = 1000;
  int runs_per_fixture = 20;
  int semi_global_samples = 200;
};

/// Runs the requested criteria. Throws ConfigError when the list is empty or
/// names an unknown criterion.
AcceptanceReport run_acceptance_suite(std::uint64_t seed, const AcceptanceOptions& options = {});

/// Anisotropic quadratic ½xᵀQx + cᵀx on the unit disc whose penalized-flow
/// equilibrium projects to a non-critical point.
struct ContrastInstance {
  Mat Q;
  Vec c;
  double K = 0.5;
  Vec x0;
};

struct ContrastOutcome {
  std::string penalized_status;
  std::string antiwindup_status;
  double penalized_residual = 0.0;  // normal residual at P_C(penalized equilibrium)
  double antiwindup_residual = 0.0;
  Vec penalized_equilibrium;
  Vec antiwindup_equilibrium;
};

ContrastOutcome evaluate_contrast(const ContrastInstance& instance, double dt);

/// Draws random rotated diagonal quadratics with minimizers outside the disc
/// until the residual gap exceeds 1e−3. Empty if `max_tries` draws fail.
std::optional<ContrastInstance> scan_penalized_contrast(std::uint64_t seed, int max_tries = 100,
                                                        double dt = 1e-3);

/// The instance recorded in the test fixtures.
ContrastInstance recorded_contrast_instance();

}  // namespace awflow
