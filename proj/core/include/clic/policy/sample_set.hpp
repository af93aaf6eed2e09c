#pragma once

#include "clic/numkit/mlp.hpp"

namespace clic::policy {

// The action set used to estimate both the policy and the target at one
// state: row 0 = a^h, row 1 = a^r, then the Langevin samples.
struct ActionSampleSet {
  numkit::Vector state;
  numkit::Matrix actions;
  numkit::Vector energies;  // parallel to actions; filled by the caller

  static constexpr Eigen::Index kHumanRow = 0;
  static constexpr Eigen::Index kRobotRow = 1;

  Eigen::Index size() const { return actions.rows(); }

  static ActionSampleSet assemble(const numkit::Vector& state,
                                  const numkit::Vector& human_action,
                                  const numkit::Vector& robot_action,
                                  const numkit::Matrix& samples) {
    ActionSampleSet set;
    set.state = state;
    set.actions.resize(samples.rows() + 2, human_action.size());
    set.actions.row(kHumanRow) = human_action.transpose();
    set.actions.row(kRobotRow) = robot_action.transpose();
    set.actions.bottomRows(samples.rows()) = samples;
    return set;
  }
};

}  // namespace clic::policy
