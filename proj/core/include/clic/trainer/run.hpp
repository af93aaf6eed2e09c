#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>

#include "clic/envs/env.hpp"
#include "clic/envs/teacher.hpp"
#include "clic/trainer/learner.hpp"
#include "clic/trainer/metrics.hpp"
#include "clic/trainer/replay_buffer.hpp"

namespace clic::trainer {

// Independent generator for one named purpose, derived from the master seed.
std::mt19937_64 derive_rng(std::uint64_t seed, std::uint64_t stream);

enum RngStream : std::uint64_t {
  kInitStream = 1,
  kEnvStream,
  kTeacherStream,
  kActStream,
  kTrainStream,
  kEvalStream,
};

// Success rate of `learner` over n_rollouts episodes, teacher off. Rollouts
// run in lockstep so each step is one batched inference call.
double evaluate(const Learner& learner, envs::EnvKind kind, int n_rollouts,
                std::mt19937_64& rng);

using FeedbackFn = std::function<std::optional<ObservedCorrection>(
    const Vector& state, const Vector& robot_action, int step_index)>;

// Interactive loop state: env, learner, buffer and generators. Drives one
// step at a time so a scripted or a human teacher can sit in the loop.
class IilSession {
 public:
  explicit IilSession(ExperimentConfig config);

  struct StepInfo {
    int t = 0;  // 1-based step within the episode
    Vector state;
    Vector robot_action;
    envs::StepOutcome outcome;
    bool feedback = false;
    bool updated = false;
    bool done = false;
  };

  void begin_episode();
  // Observe, execute a^r, ask `feedback` (may be empty), store, update when
  // t % b == 0 or feedback arrived.
  StepInfo step(const FeedbackFn& feedback);
  // Stores a correction that arrives outside step() and updates.
  bool ingest_feedback(ObservedCorrection correction);
  // End-of-episode training; returns the number of updates run.
  int end_episode();
  // Runs a single update if the buffer is non-empty.
  bool update_once();

  double evaluate_now(int rollouts);

  const ExperimentConfig& config() const { return config_; }
  Learner& learner() { return *learner_; }
  const Learner& learner() const { return *learner_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const envs::Env& env() const { return env_; }
  int episode() const { return episode_; }
  std::int64_t timesteps() const { return timesteps_; }
  int episode_feedback() const { return episode_feedback_; }
  int episode_updates() const { return episode_updates_; }

  // Replaces the learner, e.g. when the method changes mid-session.
  void reset_learner(ExperimentConfig config);

 private:
  ExperimentConfig config_;
  std::unique_ptr<Learner> learner_;
  ReplayBuffer buffer_;
  envs::Env env_;
  std::mt19937_64 env_rng_, act_rng_, train_rng_, eval_rng_;
  int episode_ = 0;
  int t_ = 0;
  std::int64_t timesteps_ = 0;
  int episode_feedback_ = 0;
  int episode_updates_ = 0;
};

struct RunOptions {
  // When set, a diagnostic checkpoint is written here if training diverges.
  std::optional<std::string> out_dir;
  // When set, the trained learner is saved here at the end of the run.
  std::optional<std::string> final_checkpoint;
  // Called after every evaluation.
  std::function<void(const EvalPoint&)> on_eval;
};

// The full interactive loop with the simulated teacher. Evaluates after the
// first episode, every eval_every episodes, and after the last one.
MetricsLog run_iil(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace clic::trainer
