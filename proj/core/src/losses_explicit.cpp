#include "clic/losses/explicit.hpp"

#include "clic/error.hpp"

namespace clic::losses {
namespace {

void check_rows(const GaussianPolicy& policy, const Matrix& states, Eigen::Index rows,
                const char* who) {
  if (states.rows() == 0) throw UsageError(std::string(who) + ": empty batch");
  if (states.rows() != rows) throw UsageError(std::string(who) + ": rows do not align");
  if (states.cols() != policy.state_dim()) {
    throw ConfigError(std::string(who) + ": state width mismatch");
  }
}

// Squared-error to fixed targets through the squashed head.
LossReport squared_error(const GaussianPolicy& net, const Matrix& inputs,
                         const Matrix& targets) {
  auto fwd = numkit::mlp_forward(net.spec(), net.params(), inputs);
  const double inv_batch = 1.0 / static_cast<double>(inputs.rows());
  const Matrix diff = fwd.outputs - targets;
  LossReport report;
  report.value = inv_batch * diff.squaredNorm();
  report.main_term = report.value;
  report.grads = numkit::mlp_backward(net.spec(), net.params(), fwd.cache,
                                      2.0 * inv_batch * diff)
                     .param_grads;
  return report;
}

}  // namespace

LossReport hinge_loss_explicit(const GaussianPolicy& policy, const Matrix& states,
                               std::span<const ContrastivePairSet> pair_sets) {
  check_rows(policy, states, static_cast<Eigen::Index>(pair_sets.size()), "hinge_loss");
  auto fwd = numkit::mlp_forward(policy.spec(), policy.params(), states);
  const double inv_batch = 1.0 / static_cast<double>(states.rows());
  Matrix out_grads = Matrix::Zero(fwd.outputs.rows(), fwd.outputs.cols());
  double value = 0.0;
  for (Eigen::Index r = 0; r < states.rows(); ++r) {
    const Vector mu = fwd.outputs.row(r).transpose();
    for (const auto& pair : pair_sets[r]) {
      const double margin =
          (pair.positive - mu).squaredNorm() - (pair.negative - mu).squaredNorm();
      if (margin <= 0.0) continue;
      value += inv_batch * margin;
      out_grads.row(r) += 2.0 * inv_batch * (pair.negative - pair.positive).transpose();
    }
  }
  LossReport report;
  report.value = value;
  report.main_term = value;
  report.grads = numkit::mlp_backward(policy.spec(), policy.params(), fwd.cache, out_grads)
                     .param_grads;
  return report;
}

LossReport bc_loss(const GaussianPolicy& policy, const Matrix& states,
                   const Matrix& targets) {
  check_rows(policy, states, targets.rows(), "bc_loss");
  if (targets.cols() != policy.action_dim()) throw ConfigError("bc_loss: action width mismatch");
  return squared_error(policy, states, targets);
}

Matrix human_model_input(const Matrix& robot_actions, const Matrix& states) {
  Matrix x(states.rows(), robot_actions.cols() + states.cols());
  x << robot_actions, states;
  return x;
}

BdCoachReports bdcoach_losses(const GaussianPolicy& human_model,
                              const GaussianPolicy& policy, const Matrix& states,
                              const Matrix& robot_actions,
                              const Matrix& directions, double magnitude) {
  check_rows(policy, states, robot_actions.rows(), "bdcoach_losses");
  if (directions.rows() != states.rows()) throw UsageError("bdcoach_losses: rows do not align");
  const Matrix hx = human_model_input(robot_actions, states);
  if (hx.cols() != human_model.state_dim()) {
    throw ConfigError("bdcoach_losses: human model input width mismatch");
  }
  BdCoachReports out;
  out.human = squared_error(human_model, hx, directions);
  const Matrix predicted = human_model.act_batch(hx);
  out.policy = squared_error(policy, states, robot_actions + magnitude * predicted);
  return out;
}

}  // namespace clic::losses
