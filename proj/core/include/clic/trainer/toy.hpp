#pragma once

#include <memory>
#include <random>
#include <span>
#include <vector>

#include "clic/trainer/landscape.hpp"
#include "clic/trainer/learner.hpp"

namespace clic::trainer {

struct GridMinimum {
  Vector action;
  double energy = 0.0;
  bool boundary = false;  // fallback: no strict interior minimum existed
};

// Strict minima over the 8-neighbourhood of interior grid points. Without
// any, the global minimum is returned with `boundary` set.
std::vector<GridMinimum> find_grid_minima(const Vector& energies, const LandscapeGrid& grid);

struct ToyMetrics {
  double mse_to_optimal = 0.0;        // trial mean of mean |m - a*|^2 over minima
  double mse_to_human = 0.0;          // trial mean of mean min_i |m - a^h_i|^2
  double cross_trial_variance = 0.0;  // grid mean of the across-trial variance
  int flagged_trials = 0;             // trials that fell back to a boundary minimum
};

// energies[k] is trial k's grid (see grid_energies); each trial's grid is
// min-max normalised to [0, 1] before the variance is taken.
ToyMetrics toy_metrics(std::span<const Vector> energies,
                       std::span<const std::vector<ObservedCorrection>> datasets,
                       const LandscapeGrid& grid, const Vector& optimal);

// Offline training on a frozen buffer: `steps` policy-shaping updates.
std::unique_ptr<Learner> train_offline(const ExperimentConfig& config,
                                       const std::vector<ObservedCorrection>& data,
                                       int steps);

}  // namespace clic::trainer
