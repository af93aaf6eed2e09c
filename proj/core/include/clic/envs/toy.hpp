#pragma once

#include <cstdint>
#include <vector>

#include "clic/desired_space/correction.hpp"

namespace clic::envs {

inline constexpr double kToyMinGap = 0.2;

// Offline corrections at the constant toy state [0]: a^h ~ N(0, sigma^2 I)
// clipped to the box, a^r uniform with |a^r - a^h| > 0.2. Absolute kind.
std::vector<desired_space::ObservedCorrection> make_toy_dataset(
    std::uint64_t trial_seed, int n_points, double sigma = 0.15);

// Two-mode variant: a^r uniform, a^h is the optimum (-0.5, 0) or (0.5, 0)
// nearer to a^r plus N(0, sigma^2 I) noise, clipped.
std::vector<desired_space::ObservedCorrection> make_toy_multi_dataset(
    std::uint64_t trial_seed, int n_points, double sigma = 0.0);

}  // namespace clic::envs
