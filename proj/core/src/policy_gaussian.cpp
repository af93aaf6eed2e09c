#include "clic/policy/gaussian.hpp"

#include "clic/error.hpp"

namespace clic::policy {

numkit::MlpSpec squashed_mlp_spec(int in, int out, const std::vector<int>& hidden) {
  numkit::MlpSpec spec;
  spec.widths.push_back(in);
  spec.widths.insert(spec.widths.end(), hidden.begin(), hidden.end());
  spec.widths.push_back(out);
  spec.head = numkit::OutputHead::kSymmetricSigmoid;
  return spec;
}

GaussianPolicy::GaussianPolicy(int state_dim, int action_dim,
                               numkit::MlpSpec spec, numkit::MlpParams params)
    : state_dim_(state_dim),
      action_dim_(action_dim),
      spec_(std::move(spec)),
      params_(std::move(params)) {
  spec_.validate();
  if (spec_.input_dim() != state_dim_ || spec_.output_dim() != action_dim_) {
    throw ConfigError("gaussian policy: spec widths do not match dimensions");
  }
  if (spec_.head != numkit::OutputHead::kSymmetricSigmoid) {
    throw ConfigError("gaussian policy: mean network needs the squashed head");
  }
  if (!params_.matches(spec_)) {
    throw ConfigError("gaussian policy: parameters do not match the spec");
  }
}

GaussianPolicy GaussianPolicy::create(int state_dim, int action_dim,
                                      const std::vector<int>& hidden,
                                      std::mt19937_64& rng) {
  auto spec = squashed_mlp_spec(state_dim, action_dim, hidden);
  auto params = numkit::MlpParams::glorot_uniform(spec, rng);
  return GaussianPolicy(state_dim, action_dim, std::move(spec), std::move(params));
}

Vector GaussianPolicy::act(const Vector& state) const {
  Matrix s(1, state.size());
  s.row(0) = state.transpose();
  return act_batch(s).row(0).transpose();
}

Matrix GaussianPolicy::act_batch(const Matrix& states) const {
  if (states.cols() != state_dim_) {
    throw ConfigError("gaussian policy: state width mismatch");
  }
  return numkit::mlp_predict(spec_, params_, states);
}

}  // namespace clic::policy
