#pragma once

#include <span>

#include "clic/losses/report.hpp"
#include "clic/policy/energy.hpp"
#include "clic/policy/sample_set.hpp"

namespace clic::losses {

using numkit::Matrix;
using numkit::Vector;
using policy::ActionSampleSet;
using policy::EnergyModel;

// KL(target || pi_theta) on each sample set, pi_theta estimated by the softmax
// of -E over the set. Targets are constants. Averaged over the batch.
LossReport kl_loss(const EnergyModel& model, std::span<const ActionSampleSet> sets,
                   std::span<const Vector> targets);
LossReport kl_loss(const EnergyModel& model, const ActionSampleSet& set,
                   const Vector& target);

// Same loss with the policy-weighted target rebuilt from the live energies,
// so gradients also flow through the target weights.
LossReport kl_loss_through_target(const EnergyModel& model,
                                  std::span<const ActionSampleSet> sets,
                                  std::span<const Vector> obs_probs);

struct InfoNceItem {
  Vector state;
  Vector positive;
  Matrix negatives;  // rows
};

// -log softmax(-E)[positive] over {positive} U negatives, batch mean.
LossReport infonce_loss(const EnergyModel& model, std::span<const InfoNceItem> items);
LossReport infonce_loss(const EnergyModel& model, const Vector& state,
                        const Vector& positive, const Matrix& negatives);

// (E(s, a^h) + 1)^2 + (E(s, a^r) - 1)^2, batch mean. Rows align.
LossReport pvp_loss(const EnergyModel& model, const Matrix& states,
                    const Matrix& robot_actions, const Matrix& human_actions);

struct GradientPenaltyConfig {
  double delta = 1e-3;   // finite-difference probe
  double margin = 1.0;   // M
  double weight = 1.0;
};

// weight * mean_r max(0, |g_r| - M)^2 where g_r is the central-difference
// estimate of dE/da at row r. Rows of states and actions align.
LossReport gradient_penalty(const EnergyModel& model, const Matrix& states,
                            const Matrix& actions,
                            const GradientPenaltyConfig& config);

}  // namespace clic::losses
