#pragma once

#include <optional>
#include <random>
#include <span>

#include "clic/action_box.hpp"
#include "clic/desired_space/geometry.hpp"

namespace clic::desired_space {

struct VolumeEstimate {
  double fraction = 0.0;  // share of box samples inside every space
  int inside = 0;
  int samples = 0;
  std::optional<bool> contains_target;  // exact hard test, if a target was given

  // One binomial standard error of `fraction`.
  double standard_error() const;
};

// Monte Carlo volume of the intersection of `spaces` (hard membership) as a
// fraction of the box. n_mc must be >= 1000.
VolumeEstimate intersect_volume_mc(std::span<const DesiredSpace> spaces,
                                   const ActionBox& box, int n_mc,
                                   std::mt19937_64& rng,
                                   const Vector* target = nullptr);

}  // namespace clic::desired_space
