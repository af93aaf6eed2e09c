#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "clic/numkit/mlp.hpp"

namespace clic::testkit {

// Central differences of `loss` over every entry of `params`, compared with
// `analytic` as |a - n| / max(|a|, |n|, 1e-12) over the flattened vectors.
inline double fd_relative_error(numkit::MlpParams params, const numkit::MlpParams& analytic,
                                const std::function<double(const numkit::MlpParams&)>& loss,
                                double h = 1e-5) {
  std::vector<double> flat = params.flatten();
  std::vector<double> numeric(flat.size());
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const double keep = flat[i];
    flat[i] = keep + h;
    params.assign_flat(flat);
    const double up = loss(params);
    flat[i] = keep - h;
    params.assign_flat(flat);
    const double down = loss(params);
    flat[i] = keep;
    numeric[i] = (up - down) / (2.0 * h);
  }
  const std::vector<double> a = analytic.flatten();
  double diff = 0.0, na = 0.0, nn = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - numeric[i]) * (a[i] - numeric[i]);
    na += a[i] * a[i];
    nn += numeric[i] * numeric[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nn), 1e-12});
}

}  // namespace clic::testkit
