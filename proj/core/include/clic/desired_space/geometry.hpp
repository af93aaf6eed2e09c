#pragma once

#include <random>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "clic/desired_space/correction.hpp"

namespace clic::desired_space {

using Matrix = Eigen::MatrixXd;

// Half-space {a : |a - negative| >= |a - positive|}.
struct ContrastivePair {
  Vector negative;
  Vector positive;
  bool apex = false;  // the (a^r, a^r + eps*e*h) pair
};

using ContrastivePairSet = std::vector<ContrastivePair>;

// Intersection of half-spaces: a cone with apex (1 - eps) a^r + eps a^h and
// opening set by alpha, approximated by n_implicit sampled directions.
struct PolytopeSpec {
  double alpha_deg = 30.0;  // (0, 180]
  double epsilon = 0.3;     // [0, 1)
  int n_implicit = 32;      // >= 1
};

// Ball around a^h with radius (1 - eps) |a^r - a^h|. eps = 1 is accepted as
// the zero-radius limit.
struct CircularSpec {
  double epsilon = 0.5;
};

struct DesiredSpaceSpec {
  std::variant<PolytopeSpec, CircularSpec> geometry = PolytopeSpec{};
  double temperature = 0.1;

  bool is_polytope() const { return std::holds_alternative<PolytopeSpec>(geometry); }
  void validate() const;
};

// Unit vectors at exactly alpha_deg from h, h^- = cos(alpha) h + sin(alpha) u,
// with u i.i.d. uniform on the unit sphere orthogonal to h. In one dimension
// the only admissible direction is -h.
std::vector<Vector> sample_negative_directions(const Vector& h, double alpha_deg,
                                               int count, std::mt19937_64& rng);

// Pair 0 (dropped when eps == 0) is (a^r, a^r + eps*e*h); pairs i >= 1 are
// (a^r + eps*e*h + (1 - eps)*e*h^-_i, a^h) with e = |a^h - a^r|. Partial
// corrections build pairs in the masked subspace and copy a^r elsewhere.
ContrastivePairSet make_pairs_polytope(const ObservedCorrection& correction,
                                       const PolytopeSpec& spec,
                                       std::mt19937_64& rng);

bool halfspace_membership(const Vector& a, const Vector& negative,
                          const Vector& positive);

// (1 + exp(-x / T))^-1, evaluated without overflow.
double tempered_sigmoid(double x, double temperature);

double obs_prob_halfspace(const Vector& a, const Vector& negative,
                          const Vector& positive, double temperature);
double obs_prob_polytope(const Vector& a, const ContrastivePairSet& pairs,
                         double temperature);
double obs_prob_circular(const Vector& a, const Vector& robot_action,
                         const Vector& human_action, double epsilon,
                         double temperature);

// One desired action space with its smooth observation model.
class DesiredSpace {
 public:
  struct Polytope {
    ContrastivePairSet pairs;
  };
  struct Ball {
    Vector center;
    double radius = 0.0;
  };

  static DesiredSpace polytope(ContrastivePairSet pairs, double temperature);
  static DesiredSpace ball(Vector center, double radius, double temperature);
  // Throws ConfigError for a circular space built from non-absolute feedback.
  static DesiredSpace build(const ObservedCorrection& correction,
                            const DesiredSpaceSpec& spec, std::mt19937_64& rng);

  double probability(const Vector& a) const;
  Vector probabilities(const Matrix& actions) const;  // one per row
  bool contains(const Vector& a) const;               // hard rule, ties inside
  std::vector<bool> contains_rows(const Matrix& actions) const;

  double temperature() const { return temperature_; }
  const std::variant<Polytope, Ball>& geometry() const { return geometry_; }

 private:
  DesiredSpace(std::variant<Polytope, Ball> g, double t)
      : geometry_(std::move(g)), temperature_(t) {}

  std::variant<Polytope, Ball> geometry_;
  double temperature_;
};

}  // namespace clic::desired_space
