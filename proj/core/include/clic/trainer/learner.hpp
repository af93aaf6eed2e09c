#pragma once

#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "clic/desired_space/geometry.hpp"
#include "clic/losses/report.hpp"
#include "clic/numkit/adam.hpp"
#include "clic/policy/energy.hpp"
#include "clic/policy/gaussian.hpp"
#include "clic/trainer/config.hpp"

namespace clic::trainer {

using desired_space::DesiredSpace;
using desired_space::ObservedCorrection;
using numkit::Matrix;
using numkit::Vector;

using Batch = std::vector<const ObservedCorrection*>;

struct NamedNetwork {
  std::string name;  // "energy", "policy" or "human"
  numkit::MlpSpec spec;
  numkit::MlpParams params;
};

// The trainable side of a method: a policy plus its optimiser state.
class Learner {
 public:
  virtual ~Learner() = default;

  Method method() const { return config_.method; }
  const ExperimentConfig& config() const { return config_; }

  // One action per state row.
  virtual Matrix act(const Matrix& states, std::mt19937_64& rng) const = 0;
  Vector act(const Vector& state, std::mt19937_64& rng) const;

  // Whether update() consumes desired spaces.
  bool needs_spaces() const;

  // One policy-shaping update. `spaces` aligns with `batch` and is required
  // exactly when needs_spaces(). Throws NumericError on a non-finite loss or
  // gradient, leaving the parameters untouched.
  virtual losses::LossReport update(const Batch& batch,
                                    std::span<const DesiredSpace> spaces,
                                    std::mt19937_64& rng) = 0;

  virtual const policy::EnergyModel* energy() const { return nullptr; }
  virtual const policy::GaussianPolicy* gaussian() const { return nullptr; }

  virtual std::vector<NamedNetwork> networks() const = 0;
  // Replaces parameters by name; CheckpointError on a missing or mismatched
  // network.
  virtual void restore(const std::vector<NamedNetwork>& nets) = 0;

 protected:
  explicit Learner(ExperimentConfig config) : config_(std::move(config)) {}
  ExperimentConfig config_;
};

std::unique_ptr<Learner> make_learner(const ExperimentConfig& config, std::mt19937_64& rng);

// Desired spaces for each record of `batch` under the config's spec.
std::vector<DesiredSpace> build_spaces(const ExperimentConfig& config, const Batch& batch,
                                       std::mt19937_64& rng);

// Builds the method's desired spaces and applies one update.
losses::LossReport policy_shaping_step(Learner& learner, const Batch& batch,
                                       std::mt19937_64& rng);

}  // namespace clic::trainer
