#include "clic/trainer/run.hpp"

#include <filesystem>

#include "clic/error.hpp"
#include "clic/trainer/checkpoint.hpp"

namespace clic::trainer {

std::mt19937_64 derive_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x636c6963u};
  return std::mt19937_64(seq);
}

double evaluate(const Learner& learner, envs::EnvKind kind, int n_rollouts,
                std::mt19937_64& rng) {
  if (n_rollouts < 1) throw UsageError("evaluate: n_rollouts must be >= 1");
  std::vector<envs::Env> envs(n_rollouts, envs::Env(kind));
  for (auto& e : envs) e.reset(rng);
  const int sdim = envs::env_dims(kind).state_dim;
  while (true) {
    std::vector<int> live;
    for (int i = 0; i < n_rollouts; ++i) {
      if (!envs[i].done()) live.push_back(i);
    }
    if (live.empty()) break;
    Matrix states(static_cast<Eigen::Index>(live.size()), sdim);
    for (std::size_t k = 0; k < live.size(); ++k) states.row(k) = envs[live[k]].state().transpose();
    const Matrix actions = learner.act(states, rng);
    for (std::size_t k = 0; k < live.size(); ++k) envs[live[k]].step(actions.row(k).transpose());
  }
  int successes = 0;
  for (const auto& e : envs) successes += e.success() ? 1 : 0;
  return static_cast<double>(successes) / n_rollouts;
}

IilSession::IilSession(ExperimentConfig config)
    : config_(std::move(config)),
      buffer_(config_.method == Method::kDCoach ? static_cast<std::size_t>(config_.dcoach_buffer)
                                                : ReplayBuffer::kUnbounded),
      env_(config_.env),
      env_rng_(derive_rng(config_.seed, kEnvStream)),
      act_rng_(derive_rng(config_.seed, kActStream)),
      train_rng_(derive_rng(config_.seed, kTrainStream)),
      eval_rng_(derive_rng(config_.seed, kEvalStream)) {
  config_.validate();
  auto init = derive_rng(config_.seed, kInitStream);
  learner_ = make_learner(config_, init);
}

void IilSession::reset_learner(ExperimentConfig config) {
  config.validate();
  auto init = derive_rng(config.seed, kInitStream);
  learner_ = make_learner(config, init);
  config_ = std::move(config);
}

void IilSession::begin_episode() {
  env_.reset(env_rng_);
  ++episode_;
  t_ = 0;
  episode_feedback_ = 0;
  episode_updates_ = 0;
}

bool IilSession::update_once() {
  if (buffer_.empty()) return false;
  const Batch batch = buffer_.sample(config_.batch_size, train_rng_);
  policy_shaping_step(*learner_, batch, train_rng_);
  ++episode_updates_;
  return true;
}

IilSession::StepInfo IilSession::step(const FeedbackFn& feedback) {
  if (env_.done()) throw UsageError("IilSession::step: episode is over");
  StepInfo info;
  info.t = ++t_;
  info.state = env_.state();
  info.robot_action = learner_->act(info.state, act_rng_);
  info.outcome = env_.step(info.robot_action);
  ++timesteps_;
  std::optional<ObservedCorrection> corr;
  if (feedback) corr = feedback(info.state, info.robot_action, info.t);
  if (corr) {
    buffer_.append(std::move(*corr));
    ++episode_feedback_;
    info.feedback = true;
  }
  if (info.t % config_.update_every == 0 || info.feedback) info.updated = update_once();
  info.done = env_.done();
  return info;
}

bool IilSession::ingest_feedback(ObservedCorrection correction) {
  buffer_.append(std::move(correction));
  ++episode_feedback_;
  return update_once();
}

int IilSession::end_episode() {
  int n = 0;
  for (int i = 0; i < config_.n_training; ++i) n += update_once() ? 1 : 0;
  return n;
}

double IilSession::evaluate_now(int rollouts) {
  // Same start states at every evaluation.
  auto rng = eval_rng_;
  return evaluate(*learner_, config_.env, rollouts, rng);
}

MetricsLog run_iil(const ExperimentConfig& config, const RunOptions& options) {
  IilSession session(config);
  envs::TeacherConfig tc = config.teacher;
  tc.seed = derive_rng(config.seed ^ config.teacher.seed, kTeacherStream)();
  envs::SimulatedTeacher teacher(config.env, tc);
  const FeedbackFn feedback = [&](const Vector& s, const Vector& ar, int t) {
    return teacher.feedback(s, ar, t);
  };

  MetricsLog log;
  for (int ep = 1; ep <= config.episodes; ++ep) {
    try {
      session.begin_episode();
      while (!session.env().done()) session.step(feedback);
      session.end_episode();
    } catch (const NumericError& e) {
      log.aborted = true;
      log.abort_reason = e.what();
      if (options.out_dir) {
        std::filesystem::create_directories(*options.out_dir);
        save_checkpoint(*options.out_dir + "/diverged.ckpt.json",
                        make_checkpoint(session.learner()));
      }
      break;
    }
    log.feedback_per_episode.push_back(session.episode_feedback());
    log.updates_per_episode.push_back(session.episode_updates());
    log.episodes_run = ep;
    log.total_timesteps = session.timesteps();
    log.clipped_actions = session.env().clipped_actions();

    const bool due = ep == 1 || ep == config.episodes ||
                     (config.eval_every > 0 && ep % config.eval_every == 0);
    if (!due) continue;
    EvalPoint point{session.timesteps(), ep, session.evaluate_now(config.eval_rollouts)};
    log.add_eval(point);
    if (options.on_eval) options.on_eval(point);
    if (config.stop_at_success && point.success_rate >= *config.stop_at_success) break;
  }
  if (options.final_checkpoint && !log.aborted) {
    save_checkpoint(*options.final_checkpoint, make_checkpoint(session.learner()));
  }
  return log;
}

}  // namespace clic::trainer
