#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "clic/action_box.hpp"
#include "clic/policy/energy.hpp"

namespace clic::policy {

// Stochastic gradient Langevin dynamics:
//   a <- clip(a - lambda_i * dE/da + noise_scale * sqrt(2 lambda_i) * w)
// with lambda_i = step_init * (1 - i / n_steps)^decay_power + step_min.
struct LangevinConfig {
  int n_samples = 128;  // chains per state
  int n_steps = 25;
  double step_init = 0.1;
  double step_min = 1e-5;
  double decay_power = 2.0;
  double noise_scale = 1.0;  // 0 disables noise
  bool noise_on_final_step = true;
  std::uint64_t seed = 0;

  double step_size(int i) const;
  void validate() const;
};

struct LangevinResult {
  Matrix actions;    // (n_states * n_samples) x action_dim, grouped by state
  int restarts = 0;  // chains re-initialised after a non-finite gradient
};

// Chains start uniform in `box`; every iterate is clipped back into it.
LangevinResult langevin_sample(const EnergySurface& energy, const Vector& state,
                               const LangevinConfig& config,
                               std::mt19937_64& rng,
                               const ActionBox* box = nullptr);

// Rows of `states` are independent states; n_samples chains each.
LangevinResult langevin_sample_batch(const EnergySurface& energy,
                                     const Matrix& states,
                                     const LangevinConfig& config,
                                     std::mt19937_64& rng,
                                     const ActionBox* box = nullptr);

// Lowest-energy final sample across all chains.
Vector infer_action(const EnergySurface& energy, const Vector& state,
                    const LangevinConfig& config, std::mt19937_64& rng);
// Seeds its own generator from config.seed.
Vector infer_action(const EnergySurface& energy, const Vector& state,
                    const LangevinConfig& config);
// One action per row of `states`.
Matrix infer_actions(const EnergySurface& energy, const Matrix& states,
                     const LangevinConfig& config, std::mt19937_64& rng);

// Softmax of negated energies, stabilised by the minimum energy.
Vector estimate_policy_probs(const Vector& energies);

}  // namespace clic::policy
