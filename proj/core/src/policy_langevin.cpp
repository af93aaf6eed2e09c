#include "clic/policy/langevin.hpp"

#include <algorithm>
#include <cmath>

#include "clic/error.hpp"

namespace clic::policy {

double LangevinConfig::step_size(int i) const {
  const double frac = 1.0 - static_cast<double>(i) / static_cast<double>(n_steps);
  return step_init * std::pow(frac, decay_power) + step_min;
}

void LangevinConfig::validate() const {
  if (n_samples < 1) throw ConfigError("langevin: n_samples must be >= 1");
  if (n_steps < 1) throw ConfigError("langevin: n_steps must be >= 1");
  if (!(step_init > 0.0)) throw ConfigError("langevin: step_init must be > 0");
  if (step_min < 0.0) throw ConfigError("langevin: step_min must be >= 0");
  if (noise_scale < 0.0) throw ConfigError("langevin: noise_scale must be >= 0");
}

LangevinResult langevin_sample(const EnergySurface& energy, const Vector& state,
                               const LangevinConfig& config,
                               std::mt19937_64& rng, const ActionBox* box) {
  Matrix states(1, state.size());
  states.row(0) = state.transpose();
  return langevin_sample_batch(energy, states, config, rng, box);
}

LangevinResult langevin_sample_batch(const EnergySurface& energy,
                                     const Matrix& states,
                                     const LangevinConfig& config,
                                     std::mt19937_64& rng,
                                     const ActionBox* box) {
  config.validate();
  if (states.cols() != energy.state_dim()) {
    throw ConfigError("langevin: state width does not match the energy model");
  }
  const ActionBox bounds = box ? *box : ActionBox{energy.action_dim()};
  if (bounds.dim != energy.action_dim()) {
    throw ConfigError("langevin: action box dimension mismatch");
  }

  const Eigen::Index n = config.n_samples;
  const Eigen::Index rows = states.rows() * n;
  Matrix chain_states(rows, states.cols());
  for (Eigen::Index k = 0; k < states.rows(); ++k) {
    chain_states.middleRows(k * n, n) = states.row(k).replicate(n, 1);
  }

  std::uniform_real_distribution<double> uniform(bounds.lo, bounds.hi);
  std::normal_distribution<double> normal(0.0, 1.0);

  LangevinResult result;
  Matrix& a = result.actions;
  a.resize(rows, bounds.dim);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (int d = 0; d < bounds.dim; ++d) a(r, d) = uniform(rng);
  }

  for (int i = 0; i < config.n_steps; ++i) {
    const double lambda = config.step_size(i);
    const bool last = i + 1 == config.n_steps;
    const double sigma = (last && !config.noise_on_final_step)
                             ? 0.0
                             : config.noise_scale * std::sqrt(2.0 * lambda);
    const Matrix grads = energy.evaluate(chain_states, a, true).action_grads;
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (!grads.row(r).allFinite()) {
        for (int d = 0; d < bounds.dim; ++d) a(r, d) = uniform(rng);
        ++result.restarts;
        continue;
      }
      for (int d = 0; d < bounds.dim; ++d) {
        double next = a(r, d) - lambda * grads(r, d);
        if (sigma > 0.0) next += sigma * normal(rng);
        a(r, d) = std::clamp(next, bounds.lo, bounds.hi);
      }
    }
  }
  return result;
}

Matrix infer_actions(const EnergySurface& energy, const Matrix& states,
                     const LangevinConfig& config, std::mt19937_64& rng) {
  const LangevinResult samples = langevin_sample_batch(energy, states, config, rng);
  const Eigen::Index n = config.n_samples;
  Matrix chain_states(samples.actions.rows(), states.cols());
  for (Eigen::Index k = 0; k < states.rows(); ++k) {
    chain_states.middleRows(k * n, n) = states.row(k).replicate(n, 1);
  }
  const Vector e = energy.evaluate(chain_states, samples.actions, false).energies;
  Matrix best(states.rows(), energy.action_dim());
  for (Eigen::Index k = 0; k < states.rows(); ++k) {
    Eigen::Index arg = 0;
    e.segment(k * n, n).minCoeff(&arg);
    best.row(k) = samples.actions.row(k * n + arg);
  }
  return best;
}

Vector infer_action(const EnergySurface& energy, const Vector& state,
                    const LangevinConfig& config, std::mt19937_64& rng) {
  Matrix states(1, state.size());
  states.row(0) = state.transpose();
  return infer_actions(energy, states, config, rng).row(0).transpose();
}

Vector infer_action(const EnergySurface& energy, const Vector& state,
                    const LangevinConfig& config) {
  std::mt19937_64 rng(config.seed);
  return infer_action(energy, state, config, rng);
}

Vector estimate_policy_probs(const Vector& energies) {
  if (energies.size() == 0) {
    throw UsageError("estimate_policy_probs: empty sample list");
  }
  const double lowest = energies.minCoeff();
  Vector p = (-(energies.array() - lowest)).exp().matrix();
  p /= p.sum();
  return p;
}

}  // namespace clic::policy
