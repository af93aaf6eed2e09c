#pragma once

#include <random>
#include <span>
#include <vector>

#include "clic/numkit/mlp.hpp"

namespace clic::policy {

using numkit::Matrix;
using numkit::Vector;

struct EnergyEvaluation {
  Vector energies;      // one per row
  Matrix action_grads;  // dE/da per row; empty unless requested
};

// Anything Langevin sampling can run on. Row r of `states` pairs with row r
// of `actions`.
class EnergySurface {
 public:
  virtual ~EnergySurface() = default;
  virtual int state_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual EnergyEvaluation evaluate(const Matrix& states, const Matrix& actions,
                                    bool with_action_grads) const = 0;
};

// E_theta(s, a): an MLP over the concatenation [s, a] with a scalar
// identity head. pi(a|s) is proportional to exp(-E).
class EnergyModel final : public EnergySurface {
 public:
  EnergyModel(int state_dim, int action_dim, numkit::MlpSpec spec,
              numkit::MlpParams params);

  // hidden = widths between input and the scalar output.
  static EnergyModel create(int state_dim, int action_dim,
                            const std::vector<int>& hidden,
                            std::mt19937_64& rng);

  int state_dim() const override { return state_dim_; }
  int action_dim() const override { return action_dim_; }
  EnergyEvaluation evaluate(const Matrix& states, const Matrix& actions,
                            bool with_action_grads) const override;

  // Single-state convenience: energies of each action row at `state`.
  Vector energies(const Vector& state, const Matrix& actions) const;

  // [states | actions], checked for shape.
  Matrix join(const Matrix& states, const Matrix& actions) const;

  const numkit::MlpSpec& spec() const { return spec_; }
  const numkit::MlpParams& params() const { return params_; }
  numkit::MlpParams& mutable_params() { return params_; }

 private:
  int state_dim_;
  int action_dim_;
  numkit::MlpSpec spec_;
  numkit::MlpParams params_;
};

// Broadcasts one state to `rows` rows.
Matrix repeat_state(const Vector& state, Eigen::Index rows);

}  // namespace clic::policy
