#pragma once

#include "clic/policy/energy.hpp"

namespace clic::testkit {

// E(s, a) = 0.5 k |a - c|^2, or a constant when `flat` is set.
class QuadraticSurface final : public policy::EnergySurface {
 public:
  explicit QuadraticSurface(Eigen::VectorXd c, int state_dim = 1, bool flat = false,
                            double k = 1.0)
      : c_(std::move(c)), state_dim_(state_dim), flat_(flat), k_(k) {}

  int state_dim() const override { return state_dim_; }
  int action_dim() const override { return static_cast<int>(c_.size()); }

  policy::EnergyEvaluation evaluate(const Eigen::MatrixXd&, const Eigen::MatrixXd& actions,
                                    bool with_grads) const override {
    policy::EnergyEvaluation out;
    const Eigen::MatrixXd d = actions.rowwise() - c_.transpose();
    out.energies = flat_ ? Eigen::VectorXd::Constant(actions.rows(), 3.0)
                         : Eigen::VectorXd(0.5 * k_ * d.rowwise().squaredNorm());
    if (with_grads) out.action_grads = flat_ ? Eigen::MatrixXd::Zero(d.rows(), d.cols()) : Eigen::MatrixXd(k_ * d);
    return out;
  }

 private:
  Eigen::VectorXd c_;
  int state_dim_;
  bool flat_;
  double k_;
};

}  // namespace clic::testkit
