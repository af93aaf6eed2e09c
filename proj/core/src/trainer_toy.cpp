#include "clic/trainer/toy.hpp"

#include <limits>

#include "clic/error.hpp"
#include "clic/trainer/replay_buffer.hpp"
#include "clic/trainer/run.hpp"

namespace clic::trainer {

std::vector<GridMinimum> find_grid_minima(const Vector& e, const LandscapeGrid& grid) {
  const int r = grid.resolution;
  if (e.size() != static_cast<Eigen::Index>(r) * r) {
    throw UsageError("find_grid_minima: energies do not match the grid");
  }
  auto at = [&](int i, int j) { return e(i * r + j); };
  auto point = [&](int i, int j) {
    Vector a(2);
    a << grid.lo + i * grid.step(), grid.lo + j * grid.step();
    return a;
  };
  std::vector<GridMinimum> minima;
  for (int i = 1; i + 1 < r; ++i) {
    for (int j = 1; j + 1 < r; ++j) {
      const double v = at(i, j);
      bool strict = true;
      for (int di = -1; di <= 1 && strict; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if ((di || dj) && !(v < at(i + di, j + dj))) {
            strict = false;
            break;
          }
        }
      }
      if (strict) minima.push_back({point(i, j), v, false});
    }
  }
  if (minima.empty()) {
    Eigen::Index k = 0;
    e.minCoeff(&k);
    minima.push_back({point(static_cast<int>(k / r), static_cast<int>(k % r)), e(k), true});
  }
  return minima;
}

ToyMetrics toy_metrics(std::span<const Vector> energies,
                       std::span<const std::vector<ObservedCorrection>> datasets,
                       const LandscapeGrid& grid, const Vector& optimal) {
  if (energies.empty() || energies.size() != datasets.size()) {
    throw UsageError("toy_metrics: need one dataset per trial");
  }
  ToyMetrics m;
  const double trials = static_cast<double>(energies.size());
  const Eigen::Index cells = energies.front().size();
  Vector mean = Vector::Zero(cells), sq = Vector::Zero(cells);
  for (std::size_t k = 0; k < energies.size(); ++k) {
    if (energies[k].size() != cells) throw UsageError("toy_metrics: grids differ in size");
    const auto minima = find_grid_minima(energies[k], grid);
    if (minima.front().boundary) ++m.flagged_trials;
    double to_opt = 0.0, to_human = 0.0;
    for (const auto& mn : minima) {
      to_opt += (mn.action - optimal).squaredNorm();
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : datasets[k]) best = std::min(best, (mn.action - c.human_action).squaredNorm());
      to_human += best;
    }
    m.mse_to_optimal += to_opt / minima.size() / trials;
    m.mse_to_human += to_human / minima.size() / trials;

    const double lo = energies[k].minCoeff(), hi = energies[k].maxCoeff();
    const Vector norm = hi > lo ? Vector((energies[k].array() - lo) / (hi - lo))
                                : Vector(Vector::Zero(cells));
    mean += norm;
    sq += norm.cwiseAbs2();
  }
  mean /= trials;
  const Vector var = (sq / trials - mean.cwiseAbs2()).cwiseMax(0.0);
  m.cross_trial_variance = var.mean();
  return m;
}

std::unique_ptr<Learner> train_offline(const ExperimentConfig& config,
                                       const std::vector<ObservedCorrection>& data, int steps) {
  if (data.empty()) throw UsageError("train_offline: empty dataset");
  auto init = derive_rng(config.seed, kInitStream);
  auto learner = make_learner(config, init);
  ReplayBuffer buffer;
  for (const auto& c : data) buffer.append(c);
  auto rng = derive_rng(config.seed, kTrainStream);
  for (int i = 0; i < steps; ++i) {
    policy_shaping_step(*learner, buffer.sample(config.batch_size, rng), rng);
  }
  return learner;
}

}  // namespace clic::trainer
