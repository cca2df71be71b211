#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace awflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/// Absolute tolerance for set membership and idempotence checks.
inline constexpr double kMembershipTol = 1e-9;

/// Relative band used to decide whether an inequality is active.
inline constexpr double kActiveBand = 1e-7;

}  // namespace awflow
