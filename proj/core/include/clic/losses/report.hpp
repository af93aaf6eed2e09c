#pragma once

#include "clic/numkit/mlp.hpp"

namespace clic::losses {

struct LossReport {
  double value = 0.0;         // total, including any penalty
  numkit::MlpParams grads;    // d value / d theta
  double main_term = 0.0;
  double penalty_term = 0.0;

  // Adds a second loss on the same network into this one.
  void accumulate(const LossReport& other) {
    value += other.value;
    main_term += other.main_term;
    penalty_term += other.penalty_term;
    if (grads.layers.empty()) {
      grads = other.grads;
    } else if (!other.grads.layers.empty()) {
      grads += other.grads;
    }
  }
};

}  // namespace clic::losses
