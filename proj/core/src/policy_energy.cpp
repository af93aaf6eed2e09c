#include "clic/policy/energy.hpp"

#include "clic/error.hpp"

namespace clic::policy {

EnergyModel::EnergyModel(int state_dim, int action_dim, numkit::MlpSpec spec,
                         numkit::MlpParams params)
    : state_dim_(state_dim),
      action_dim_(action_dim),
      spec_(std::move(spec)),
      params_(std::move(params)) {
  spec_.validate();
  if (state_dim_ < 0 || action_dim_ < 1) {
    throw ConfigError("energy model: invalid state/action dimensions");
  }
  if (spec_.input_dim() != state_dim_ + action_dim_) {
    throw ConfigError("energy model: input width must equal state_dim + action_dim");
  }
  if (spec_.output_dim() != 1 || spec_.head != numkit::OutputHead::kIdentity) {
    throw ConfigError("energy model: needs a scalar identity head");
  }
  if (!params_.matches(spec_)) {
    throw ConfigError("energy model: parameters do not match the spec");
  }
}

EnergyModel EnergyModel::create(int state_dim, int action_dim,
                                const std::vector<int>& hidden,
                                std::mt19937_64& rng) {
  numkit::MlpSpec spec;
  spec.widths.push_back(state_dim + action_dim);
  spec.widths.insert(spec.widths.end(), hidden.begin(), hidden.end());
  spec.widths.push_back(1);
  spec.head = numkit::OutputHead::kIdentity;
  auto params = numkit::MlpParams::glorot_uniform(spec, rng);
  return EnergyModel(state_dim, action_dim, std::move(spec), std::move(params));
}

Matrix EnergyModel::join(const Matrix& states, const Matrix& actions) const {
  if (states.rows() != actions.rows()) {
    throw ConfigError("energy model: states and actions row counts differ");
  }
  if (states.cols() != state_dim_ || actions.cols() != action_dim_) {
    throw ConfigError("energy model: state or action width mismatch");
  }
  Matrix input(states.rows(), state_dim_ + action_dim_);
  input.leftCols(state_dim_) = states;
  input.rightCols(action_dim_) = actions;
  return input;
}

EnergyEvaluation EnergyModel::evaluate(const Matrix& states,
                                       const Matrix& actions,
                                       bool with_action_grads) const {
  const Matrix input = join(states, actions);
  EnergyEvaluation out;
  if (!with_action_grads) {
    out.energies = numkit::mlp_predict(spec_, params_, input).col(0);
    return out;
  }
  auto fwd = numkit::mlp_forward(spec_, params_, input);
  out.energies = fwd.outputs.col(0);
  Matrix ones = Matrix::Ones(input.rows(), 1);
  auto bwd = numkit::mlp_backward(spec_, params_, fwd.cache, ones,
                                  numkit::GradientTargets::kInputsOnly);
  out.action_grads = bwd.input_grads.rightCols(action_dim_);
  return out;
}

Vector EnergyModel::energies(const Vector& state, const Matrix& actions) const {
  return evaluate(repeat_state(state, actions.rows()), actions, false).energies;
}

Matrix repeat_state(const Vector& state, Eigen::Index rows) {
  return state.transpose().replicate(rows, 1);
}

}  // namespace clic::policy
