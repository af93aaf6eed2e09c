#pragma once

#include <random>
#include <vector>

#include "clic/numkit/mlp.hpp"

namespace clic::policy {

using numkit::Matrix;
using numkit::Vector;

// Explicit policy N(mu_theta(s), Sigma). Sigma is degenerate: actions are
// always the mean, which the squashed head keeps inside [-1, 1].
class GaussianPolicy {
 public:
  GaussianPolicy(int state_dim, int action_dim, numkit::MlpSpec spec,
                 numkit::MlpParams params);

  static GaussianPolicy create(int state_dim, int action_dim,
                               const std::vector<int>& hidden,
                               std::mt19937_64& rng);

  Vector act(const Vector& state) const;
  Matrix act_batch(const Matrix& states) const;

  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }
  const numkit::MlpSpec& spec() const { return spec_; }
  const numkit::MlpParams& params() const { return params_; }
  numkit::MlpParams& mutable_params() { return params_; }

 private:
  int state_dim_;
  int action_dim_;
  numkit::MlpSpec spec_;
  numkit::MlpParams params_;
};

// Generic squashed-head network spec: in -> hidden... -> out.
numkit::MlpSpec squashed_mlp_spec(int in, int out, const std::vector<int>& hidden);

}  // namespace clic::policy
