#pragma once

#include <span>
#include <utility>

#include "clic/desired_space/geometry.hpp"
#include "clic/losses/report.hpp"
#include "clic/policy/gaussian.hpp"

namespace clic::losses {

using desired_space::ContrastivePairSet;
using numkit::Matrix;
using numkit::Vector;
using policy::GaussianPolicy;

// sum_i max(0, |a+_i - mu(s)|^2 - |a-_i - mu(s)|^2) per state, batch mean.
// pair_sets[r] belongs to states.row(r).
LossReport hinge_loss_explicit(const GaussianPolicy& policy, const Matrix& states,
                               std::span<const ContrastivePairSet> pair_sets);

// |mu(s) - a_target|^2, batch mean. Rows align.
LossReport bc_loss(const GaussianPolicy& policy, const Matrix& states,
                   const Matrix& targets);

// The human model H(a^r, s) is a squashed network over [a^r | s] predicting
// the correction direction.
struct BdCoachReports {
  LossReport human;
  LossReport policy;
};

// human: |H(a^r, s) - h|^2; policy: |mu(s) - (a^r + e * H(a^r, s))|^2 with H
// held constant. Both batch means.
BdCoachReports bdcoach_losses(const GaussianPolicy& human_model,
                              const GaussianPolicy& policy, const Matrix& states,
                              const Matrix& robot_actions,
                              const Matrix& directions, double magnitude);

// [a^r | s] rows for the human model.
Matrix human_model_input(const Matrix& robot_actions, const Matrix& states);

}  // namespace clic::losses
