#pragma once

#include <cstdint>

#include "clic/numkit/mlp.hpp"

namespace clic::numkit {

// Defaults follow the training setup this library reproduces, including the
// unusually small first-moment decay.
struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.1;
  double beta2 = 0.999;
  double epsilon = 1e-7;

  void validate() const;
};

struct AdamState {
  MlpParams first_moment;
  MlpParams second_moment;
  std::int64_t step = 0;

  static AdamState zeros_like(const MlpParams& params);
};

// Bias-corrected Adam update in place. Throws NumericError and leaves both
// params and state untouched if any gradient entry is non-finite.
void adam_step(MlpParams& params, const MlpParams& grads, AdamState& state,
               const AdamConfig& config);

}  // namespace clic::numkit
