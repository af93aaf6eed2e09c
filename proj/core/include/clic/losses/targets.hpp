#pragma once

#include <Eigen/Dense>

namespace clic::losses {

using Vector = Eigen::VectorXd;

// Uniform prior: target proportional to the observation model.
// Throws UsageError for negative entries or an all-zero input.
Vector target_uniform(const Vector& obs_probs);

// Policy prior: target_i proportional to obs_i * exp(-E_i), normalised in the
// log domain. If every product underflows to zero the uniform target is
// returned instead and *fell_back (when given) is set.
Vector target_policy_weighted(const Vector& obs_probs, const Vector& energies,
                              bool* fell_back = nullptr);

}  // namespace clic::losses
