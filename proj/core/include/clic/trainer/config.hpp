#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "clic/desired_space/geometry.hpp"
#include "clic/envs/env.hpp"
#include "clic/envs/teacher.hpp"
#include "clic/losses/implicit.hpp"
#include "clic/numkit/adam.hpp"
#include "clic/policy/langevin.hpp"

namespace clic::trainer {

enum class Method {
  kClicHalf,
  kClicCircular,
  kClicExplicit,
  kIbc,
  kPvp,
  kHgDagger,
  kDCoach,
  kBdCoach,
};

std::string_view to_string(Method method);
Method parse_method(std::string_view name);
bool is_implicit(Method method);  // trains an energy model

struct SamplerConfig {
  int n_samples = 128;      // N_a, also the IBC negatives
  int train_steps = 25;     // N_MCMC while training
  int infer_samples = 128;  // chains at inference
  int infer_steps = 50;     // N_MCMC at inference
  double step_init = 0.1;
  double step_min = 1e-5;
  double decay_power = 2.0;
  double noise_scale = 1.0;

  policy::LangevinConfig training(std::uint64_t seed) const;
  // Greedy: no noise on the last step.
  policy::LangevinConfig inference(std::uint64_t seed) const;
};

struct ExperimentConfig {
  Method method = Method::kClicHalf;
  envs::EnvKind env = envs::EnvKind::kPointReach2D;
  envs::TeacherConfig teacher;
  desired_space::DesiredSpaceSpec space;
  SamplerConfig sampler;
  numkit::AdamConfig adam;
  losses::GradientPenaltyConfig penalty;

  std::vector<int> hidden{64, 64, 64, 32};
  int update_every = 5;   // b
  int batch_size = 32;
  int n_training = 100;   // end-of-episode updates
  int episodes = 160;
  int eval_every = 10;    // episodes between evaluations; 0 disables
  int eval_rollouts = 10;
  bool policy_weighted_target = true;
  bool target_gradient = false;  // differentiate through the policy-weighted target
  int dcoach_buffer = 50;         // ring capacity for D-COACH
  std::vector<int> human_hidden{64, 64};  // BD-COACH human model
  // Stop once an evaluation reaches this success rate.
  std::optional<double> stop_at_success;
  std::uint64_t seed = 0;

  // Throws ConfigError on out-of-range values or a method/space mismatch.
  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& config);
// Starts from the defaults and overrides any key present; unknown keys are
// rejected with ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

// FNV-1a over the canonical JSON dump.
std::uint64_t config_hash(const ExperimentConfig& config);

}  // namespace clic::trainer
