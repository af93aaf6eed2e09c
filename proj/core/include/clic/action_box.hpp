#pragma once

#include <random>

#include <Eigen/Dense>

namespace clic {

// Axis-aligned action bounds shared by every environment: [lo, hi]^dim.
struct ActionBox {
  int dim = 2;
  double lo = -1.0;
  double hi = 1.0;

  bool contains(const Eigen::VectorXd& a, double tol = 0.0) const {
    return a.size() == dim && (a.array() >= lo - tol).all() &&
           (a.array() <= hi + tol).all();
  }

  Eigen::VectorXd clamp(const Eigen::VectorXd& a) const {
    return a.cwiseMax(lo).cwiseMin(hi);
  }

  Eigen::VectorXd uniform(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::VectorXd a(dim);
    for (int i = 0; i < dim; ++i) a(i) = u(rng);
    return a;
  }
};

}  // namespace clic
