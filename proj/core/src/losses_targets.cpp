#include "clic/losses/targets.hpp"

#include <cmath>
#include <limits>

#include "clic/error.hpp"

namespace clic::losses {

Vector target_uniform(const Vector& obs_probs) {
  if (obs_probs.size() == 0) throw UsageError("target_uniform: empty input");
  if ((obs_probs.array() < 0.0).any() || !obs_probs.allFinite()) {
    throw UsageError("target_uniform: observation probabilities must be finite and >= 0");
  }
  const double total = obs_probs.sum();
  if (!(total > 0.0)) throw UsageError("target_uniform: all observation probabilities are zero");
  return obs_probs / total;
}

Vector target_policy_weighted(const Vector& obs_probs, const Vector& energies,
                              bool* fell_back) {
  if (obs_probs.size() != energies.size()) {
    throw UsageError("target_policy_weighted: lists differ in length");
  }
  if (fell_back) *fell_back = false;
  const Eigen::Index n = obs_probs.size();
  Vector logw(n);
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (obs_probs(i) < 0.0) throw UsageError("target_policy_weighted: negative probability");
    logw(i) = obs_probs(i) > 0.0 ? std::log(obs_probs(i)) - energies(i)
                                 : -std::numeric_limits<double>::infinity();
    best = std::max(best, logw(i));
  }
  if (!std::isfinite(best)) {
    if (fell_back) *fell_back = true;
    return target_uniform(obs_probs);
  }
  Vector w = (logw.array() - best).exp().matrix();
  return w / w.sum();
}

}  // namespace clic::losses
