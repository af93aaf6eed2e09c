#include "clic/desired_space/volume.hpp"

#include <cmath>

#include "clic/error.hpp"

namespace clic::desired_space {

double VolumeEstimate::standard_error() const {
  if (samples == 0) return 0.0;
  return std::sqrt(fraction * (1.0 - fraction) / samples);
}

VolumeEstimate intersect_volume_mc(std::span<const DesiredSpace> spaces,
                                   const ActionBox& box, int n_mc,
                                   std::mt19937_64& rng, const Vector* target) {
  if (n_mc < 1000) throw UsageError("intersect_volume_mc: n_mc must be >= 1000");
  VolumeEstimate est;
  est.samples = n_mc;
  for (int i = 0; i < n_mc; ++i) {
    const Vector a = box.uniform(rng);
    bool inside = true;
    for (const auto& space : spaces) {
      if (!space.contains(a)) {
        inside = false;
        break;
      }
    }
    if (inside) ++est.inside;
  }
  est.fraction = static_cast<double>(est.inside) / n_mc;
  if (target) {
    bool inside = true;
    for (const auto& space : spaces) inside = inside && space.contains(*target);
    est.contains_target = inside;
  }
  return est;
}

}  // namespace clic::desired_space
