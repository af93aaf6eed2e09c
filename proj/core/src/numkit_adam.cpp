#include "clic/numkit/adam.hpp"

#include <cmath>

#include "clic/error.hpp"

namespace clic::numkit {

void AdamConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("adam: learning rate must be > 0");
  if (beta1 < 0.0 || beta1 >= 1.0) throw ConfigError("adam: beta1 must be in [0, 1)");
  if (beta2 < 0.0 || beta2 >= 1.0) throw ConfigError("adam: beta2 must be in [0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("adam: epsilon must be > 0");
}

AdamState AdamState::zeros_like(const MlpParams& params) {
  AdamState s;
  s.first_moment = params;
  s.first_moment *= 0.0;
  s.second_moment = s.first_moment;
  return s;
}

void adam_step(MlpParams& params, const MlpParams& grads, AdamState& state,
               const AdamConfig& config) {
  config.validate();
  const std::size_t n = params.layers.size();
  if (grads.layers.size() != n || state.first_moment.layers.size() != n ||
      state.second_moment.layers.size() != n) {
    throw ConfigError("adam: parameter, gradient and state shapes differ");
  }
  for (std::size_t l = 0; l < n; ++l) {
    if (grads.layers[l].weight.rows() != params.layers[l].weight.rows() ||
        grads.layers[l].weight.cols() != params.layers[l].weight.cols() ||
        grads.layers[l].bias.size() != params.layers[l].bias.size()) {
      throw ConfigError("adam: gradient shape mismatch");
    }
  }
  if (!grads.all_finite()) {
    throw NumericError("adam: non-finite gradient, update rejected");
  }

  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(config.beta1, t);
  const double bc2 = 1.0 - std::pow(config.beta2, t);
  const double b1 = config.beta1;
  const double b2 = config.beta2;
  const double lr = config.learning_rate;
  const double eps = config.epsilon;

  auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    p.array() -= lr * (m.array() / bc1) /
                 ((v.array() / bc2).sqrt() + eps);
  };

  for (std::size_t l = 0; l < n; ++l) {
    update(params.layers[l].weight, grads.layers[l].weight,
           state.first_moment.layers[l].weight,
           state.second_moment.layers[l].weight);
    update(params.layers[l].bias, grads.layers[l].bias,
           state.first_moment.layers[l].bias,
           state.second_moment.layers[l].bias);
  }
}

}  // namespace clic::numkit
