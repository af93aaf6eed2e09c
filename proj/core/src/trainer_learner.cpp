#include "clic/trainer/learner.hpp"

#include <cmath>

#include "clic/error.hpp"
#include "clic/losses/explicit.hpp"
#include "clic/losses/implicit.hpp"
#include "clic/losses/targets.hpp"
#include "clic/policy/langevin.hpp"
#include "clic/policy/sample_set.hpp"

namespace clic::trainer {
namespace {

Matrix stack_states(const Batch& batch) {
  Matrix s(static_cast<Eigen::Index>(batch.size()), batch.front()->state.size());
  for (std::size_t i = 0; i < batch.size(); ++i) s.row(i) = batch[i]->state.transpose();
  return s;
}

Matrix stack(const Batch& batch, Vector ObservedCorrection::*field) {
  Matrix m(static_cast<Eigen::Index>(batch.size()), (batch.front()->*field).size());
  for (std::size_t i = 0; i < batch.size(); ++i) m.row(i) = (batch[i]->*field).transpose();
  return m;
}

void check_finite(const losses::LossReport& report) {
  if (!std::isfinite(report.value) || !report.grads.all_finite()) {
    throw NumericError("training loss or gradient is not finite");
  }
}

void restore_one(const std::vector<NamedNetwork>& nets, const std::string& name,
                 const numkit::MlpSpec& spec, numkit::MlpParams& params) {
  for (const auto& n : nets) {
    if (n.name != name) continue;
    if (!(n.spec == spec) || !n.params.matches(spec)) {
      throw CheckpointError("checkpoint network '" + name + "' does not match the model spec");
    }
    params = n.params;
    return;
  }
  throw CheckpointError("checkpoint has no '" + name + "' network");
}

class ImplicitLearner final : public Learner {
 public:
  ImplicitLearner(const ExperimentConfig& config, std::mt19937_64& rng)
      : Learner(config),
        model_(policy::EnergyModel::create(envs::env_dims(config.env).state_dim,
                                           envs::env_dims(config.env).action_dim,
                                           config.hidden, rng)),
        adam_(numkit::AdamState::zeros_like(model_.params())) {}

  Matrix act(const Matrix& states, std::mt19937_64& rng) const override {
    return policy::infer_actions(model_, states, config_.sampler.inference(0), rng);
  }

  losses::LossReport update(const Batch& batch, std::span<const DesiredSpace> spaces,
                            std::mt19937_64& rng) override {
    if (batch.empty()) throw UsageError("update: empty batch");
    const Matrix states = stack_states(batch);
    losses::LossReport report;
    switch (config_.method) {
      case Method::kClicHalf:
      case Method::kClicCircular:
        report = clic_loss(batch, states, spaces, rng);
        break;
      case Method::kIbc:
        report = ibc_loss(batch, states, rng);
        break;
      case Method::kPvp:
        report = losses::pvp_loss(model_, states, stack(batch, &ObservedCorrection::robot_action),
                                  stack(batch, &ObservedCorrection::human_action));
        break;
      default:
        throw InternalError("implicit learner given an explicit method");
    }
    check_finite(report);
    numkit::adam_step(model_.mutable_params(), report.grads, adam_, config_.adam);
    return report;
  }

  const policy::EnergyModel* energy() const override { return &model_; }

  std::vector<NamedNetwork> networks() const override {
    return {{"energy", model_.spec(), model_.params()}};
  }
  void restore(const std::vector<NamedNetwork>& nets) override {
    restore_one(nets, "energy", model_.spec(), model_.mutable_params());
    adam_ = numkit::AdamState::zeros_like(model_.params());
  }

 private:
  losses::LossReport clic_loss(const Batch& batch, const Matrix& states,
                               std::span<const DesiredSpace> spaces, std::mt19937_64& rng) {
    if (spaces.size() != batch.size()) throw UsageError("update: one desired space per record");
    const auto lc = config_.sampler.training(0);
    const Matrix samples = policy::langevin_sample_batch(model_, states, lc, rng).actions;
    const Eigen::Index n = lc.n_samples;

    std::vector<policy::ActionSampleSet> sets;
    std::vector<Vector> obs;
    sets.reserve(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      sets.push_back(policy::ActionSampleSet::assemble(
          batch[i]->state, batch[i]->human_action, batch[i]->robot_action,
          samples.middleRows(static_cast<Eigen::Index>(i) * n, n)));
      obs.push_back(spaces[i].probabilities(sets.back().actions));
    }

    losses::LossReport report;
    if (config_.policy_weighted_target && config_.target_gradient) {
      report = losses::kl_loss_through_target(model_, sets, obs);
    } else {
      std::vector<Vector> targets;
      targets.reserve(sets.size());
      for (std::size_t i = 0; i < sets.size(); ++i) {
        if (config_.policy_weighted_target) {
          sets[i].energies = model_.energies(sets[i].state, sets[i].actions);
          targets.push_back(losses::target_policy_weighted(obs[i], sets[i].energies));
        } else {
          targets.push_back(losses::target_uniform(obs[i]));
        }
      }
      report = losses::kl_loss(model_, sets, targets);
    }
    add_penalty(report, states, samples, n);
    return report;
  }

  losses::LossReport ibc_loss(const Batch& batch, const Matrix& states, std::mt19937_64& rng) {
    const auto lc = config_.sampler.training(0);
    const Matrix samples = policy::langevin_sample_batch(model_, states, lc, rng).actions;
    const Eigen::Index n = lc.n_samples;
    std::vector<losses::InfoNceItem> items;
    items.reserve(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      items.push_back({batch[i]->state, batch[i]->human_action,
                       samples.middleRows(static_cast<Eigen::Index>(i) * n, n)});
    }
    losses::LossReport report = losses::infonce_loss(model_, items);
    add_penalty(report, states, samples, n);
    return report;
  }

  // Penalty on the final-step MCMC samples.
  void add_penalty(losses::LossReport& report, const Matrix& states, const Matrix& samples,
                   Eigen::Index per_state) {
    if (config_.penalty.weight == 0.0) return;
    Matrix sample_states(samples.rows(), states.cols());
    for (Eigen::Index k = 0; k < states.rows(); ++k) {
      sample_states.middleRows(k * per_state, per_state) = states.row(k).replicate(per_state, 1);
    }
    report.accumulate(losses::gradient_penalty(model_, sample_states, samples, config_.penalty));
  }

  policy::EnergyModel model_;
  numkit::AdamState adam_;
};

class ExplicitLearner final : public Learner {
 public:
  ExplicitLearner(const ExperimentConfig& config, std::mt19937_64& rng)
      : Learner(config),
        policy_(policy::GaussianPolicy::create(envs::env_dims(config.env).state_dim,
                                               envs::env_dims(config.env).action_dim,
                                               config.hidden, rng)),
        adam_(numkit::AdamState::zeros_like(policy_.params())) {
    if (config.method == Method::kBdCoach) {
      const auto dims = envs::env_dims(config.env);
      human_.emplace(policy::GaussianPolicy::create(dims.action_dim + dims.state_dim,
                                                    dims.action_dim, config.human_hidden, rng));
      human_adam_ = numkit::AdamState::zeros_like(human_->params());
    }
  }

  Matrix act(const Matrix& states, std::mt19937_64&) const override {
    return policy_.act_batch(states);
  }

  losses::LossReport update(const Batch& batch, std::span<const DesiredSpace> spaces,
                            std::mt19937_64&) override {
    if (batch.empty()) throw UsageError("update: empty batch");
    const Matrix states = stack_states(batch);
    switch (config_.method) {
      case Method::kClicExplicit: {
        if (spaces.size() != batch.size()) throw UsageError("update: one desired space per record");
        std::vector<desired_space::ContrastivePairSet> pairs;
        pairs.reserve(spaces.size());
        for (const auto& space : spaces) {
          const auto* poly = std::get_if<DesiredSpace::Polytope>(&space.geometry());
          if (!poly) throw ConfigError("clic_explicit needs polytope desired spaces");
          desired_space::ContrastivePairSet implicit_pairs;
          for (const auto& p : poly->pairs) {
            if (!p.apex) implicit_pairs.push_back(p);
          }
          pairs.push_back(std::move(implicit_pairs));
        }
        return apply(losses::hinge_loss_explicit(policy_, states, pairs));
      }
      case Method::kHgDagger:
      case Method::kDCoach:
        return apply(losses::bc_loss(policy_, states, stack(batch, &ObservedCorrection::human_action)));
      case Method::kBdCoach: {
        const Matrix ar = stack(batch, &ObservedCorrection::robot_action);
        Matrix h = stack(batch, &ObservedCorrection::human_action) - ar;
        h.rowwise().normalize();
        // The correction is re-anchored on what the policy does now.
        const Matrix current = policy_.act_batch(states);
        auto human = losses::bdcoach_losses(*human_, policy_, states, ar, h,
                                            config_.teacher.magnitude).human;
        auto policy_report = losses::bdcoach_losses(*human_, policy_, states, current, h,
                                                    config_.teacher.magnitude).policy;
        check_finite(human);
        check_finite(policy_report);
        numkit::adam_step(human_->mutable_params(), human.grads, human_adam_, config_.adam);
        return apply(std::move(policy_report));
      }
      default:
        throw InternalError("explicit learner given an implicit method");
    }
  }

  const policy::GaussianPolicy* gaussian() const override { return &policy_; }

  std::vector<NamedNetwork> networks() const override {
    std::vector<NamedNetwork> nets{{"policy", policy_.spec(), policy_.params()}};
    if (human_) nets.push_back({"human", human_->spec(), human_->params()});
    return nets;
  }
  void restore(const std::vector<NamedNetwork>& nets) override {
    restore_one(nets, "policy", policy_.spec(), policy_.mutable_params());
    adam_ = numkit::AdamState::zeros_like(policy_.params());
    if (human_) {
      restore_one(nets, "human", human_->spec(), human_->mutable_params());
      human_adam_ = numkit::AdamState::zeros_like(human_->params());
    }
  }

 private:
  losses::LossReport apply(losses::LossReport report) {
    check_finite(report);
    numkit::adam_step(policy_.mutable_params(), report.grads, adam_, config_.adam);
    return report;
  }

  policy::GaussianPolicy policy_;
  numkit::AdamState adam_;
  std::optional<policy::GaussianPolicy> human_;
  numkit::AdamState human_adam_;
};

}  // namespace

Vector Learner::act(const Vector& state, std::mt19937_64& rng) const {
  Matrix s(1, state.size());
  s.row(0) = state.transpose();
  return act(s, rng).row(0).transpose();
}

bool Learner::needs_spaces() const {
  return config_.method == Method::kClicHalf || config_.method == Method::kClicCircular ||
         config_.method == Method::kClicExplicit;
}

std::unique_ptr<Learner> make_learner(const ExperimentConfig& config, std::mt19937_64& rng) {
  config.validate();
  if (is_implicit(config.method)) return std::make_unique<ImplicitLearner>(config, rng);
  return std::make_unique<ExplicitLearner>(config, rng);
}

std::vector<DesiredSpace> build_spaces(const ExperimentConfig& config, const Batch& batch,
                                       std::mt19937_64& rng) {
  std::vector<DesiredSpace> spaces;
  spaces.reserve(batch.size());
  for (const auto* record : batch) spaces.push_back(DesiredSpace::build(*record, config.space, rng));
  return spaces;
}

losses::LossReport policy_shaping_step(Learner& learner, const Batch& batch,
                                       std::mt19937_64& rng) {
  std::vector<DesiredSpace> spaces;
  if (learner.needs_spaces()) spaces = build_spaces(learner.config(), batch, rng);
  return learner.update(batch, spaces, rng);
}

}  // namespace clic::trainer
