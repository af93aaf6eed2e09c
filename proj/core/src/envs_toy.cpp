#include "clic/envs/toy.hpp"

#include <random>

#include "clic/envs/env.hpp"
#include "clic/envs/teacher.hpp"
#include "clic/error.hpp"

namespace clic::envs {
namespace {

Vector uniform_action(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector a(2);
  a(0) = u(rng);
  a(1) = u(rng);
  return a;
}

Vector gaussian_around(const Vector& mean, double sigma, std::mt19937_64& rng) {
  Vector a = mean;
  if (sigma > 0.0) {
    std::normal_distribution<double> n(0.0, sigma);
    a(0) += n(rng);
    a(1) += n(rng);
  }
  return a.cwiseMax(-1.0).cwiseMin(1.0);
}

}  // namespace

std::vector<desired_space::ObservedCorrection> make_toy_dataset(std::uint64_t trial_seed,
                                                                int n_points, double sigma) {
  if (!(sigma > 0.0)) throw UsageError("make_toy_dataset: sigma must be > 0");
  if (n_points < 1) throw UsageError("make_toy_dataset: need at least one point");
  std::mt19937_64 rng(trial_seed);
  std::vector<desired_space::ObservedCorrection> out;
  for (int i = 0; i < n_points; ++i) {
    desired_space::ObservedCorrection c;
    c.state = Vector::Zero(1);
    c.human_action = gaussian_around(Vector::Zero(2), sigma, rng);
    do {
      c.robot_action = uniform_action(rng);
    } while ((c.robot_action - c.human_action).norm() <= kToyMinGap);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<desired_space::ObservedCorrection> make_toy_multi_dataset(
    std::uint64_t trial_seed, int n_points, double sigma) {
  if (sigma < 0.0) throw UsageError("make_toy_multi_dataset: sigma must be >= 0");
  if (n_points < 1) throw UsageError("make_toy_multi_dataset: need at least one point");
  std::mt19937_64 rng(trial_seed);
  std::vector<desired_space::ObservedCorrection> out;
  const Vector state = Vector::Zero(1);
  while (static_cast<int>(out.size()) < n_points) {
    desired_space::ObservedCorrection c;
    c.state = state;
    c.robot_action = uniform_action(rng);
    const Vector optimum = teacher_optimal_action(EnvKind::kToyMulti2D, state, &c.robot_action);
    c.human_action = gaussian_around(optimum, sigma, rng);
    if ((c.robot_action - c.human_action).norm() <= kToyMinGap) continue;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace clic::envs
