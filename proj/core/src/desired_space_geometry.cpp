#include "clic/desired_space/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "clic/error.hpp"

namespace clic::desired_space {
namespace {

constexpr double kUnitTolerance = 1e-9;

std::vector<Eigen::Index> feedback_dims(const ObservedCorrection& c) {
  std::vector<Eigen::Index> dims;
  const auto n = c.robot_action.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!c.mask || (*c.mask)[static_cast<std::size_t>(i)]) dims.push_back(i);
  }
  return dims;
}

Vector gather(const Vector& v, const std::vector<Eigen::Index>& dims) {
  Vector out(static_cast<Eigen::Index>(dims.size()));
  for (std::size_t k = 0; k < dims.size(); ++k) out(static_cast<Eigen::Index>(k)) = v(dims[k]);
  return out;
}

Vector scatter(const Vector& base, const Vector& sub,
               const std::vector<Eigen::Index>& dims) {
  Vector out = base;
  for (std::size_t k = 0; k < dims.size(); ++k) out(dims[k]) = sub(static_cast<Eigen::Index>(k));
  return out;
}

Vector row_distances(const Matrix& actions, const Vector& point) {
  return (actions.rowwise() - point.transpose()).rowwise().norm();
}

}  // namespace

void DesiredSpaceSpec::validate() const {
  if (!(temperature > 0.0)) throw ConfigError("desired space: temperature must be > 0");
  if (const auto* p = std::get_if<PolytopeSpec>(&geometry)) {
    if (!(p->alpha_deg > 0.0 && p->alpha_deg <= 180.0)) {
      throw ConfigError("polytope: alpha must lie in (0, 180] degrees");
    }
    if (!(p->epsilon >= 0.0 && p->epsilon < 1.0)) {
      throw ConfigError("polytope: epsilon must lie in [0, 1)");
    }
    if (p->n_implicit < 1) throw ConfigError("polytope: n_implicit must be >= 1");
  } else {
    const auto& c = std::get<CircularSpec>(geometry);
    if (!(c.epsilon >= 0.0 && c.epsilon <= 1.0)) {
      throw ConfigError("circular: epsilon must lie in [0, 1]");
    }
  }
}

std::vector<Vector> sample_negative_directions(const Vector& h, double alpha_deg,
                                               int count, std::mt19937_64& rng) {
  if (!(alpha_deg > 0.0 && alpha_deg <= 180.0)) {
    throw UsageError("sample_negative_directions: alpha must lie in (0, 180]");
  }
  if (count < 0) throw UsageError("sample_negative_directions: negative count");
  if (std::abs(h.norm() - 1.0) > kUnitTolerance) {
    throw UsageError("sample_negative_directions: h must be a unit vector");
  }
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  if (h.size() == 1 || alpha_deg == 180.0) {
    for (int i = 0; i < count; ++i) out.push_back(-h);
    return out;
  }
  const double alpha = alpha_deg * std::numbers::pi / 180.0;
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  std::normal_distribution<double> normal(0.0, 1.0);
  while (static_cast<int>(out.size()) < count) {
    Vector u(h.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = normal(rng);
    u -= u.dot(h) * h;
    const double norm = u.norm();
    if (norm < 1e-8) continue;
    u /= norm;
    Vector dir = c * h + s * u;
    dir.normalize();
    out.push_back(std::move(dir));
  }
  return out;
}

ContrastivePairSet make_pairs_polytope(const ObservedCorrection& correction,
                                       const PolytopeSpec& spec,
                                       std::mt19937_64& rng) {
  DesiredSpaceSpec{spec, 1.0}.validate();
  correction.validate();
  const auto dims = feedback_dims(correction);
  const Vector ar = gather(correction.robot_action, dims);
  const Vector ah = gather(correction.human_action, dims);
  const Vector diff = ah - ar;
  const double e = diff.norm();
  if (e == 0.0) {
    throw UsageError("make_pairs_polytope: correction has no component in the "
                     "feedback dimensions");
  }
  const Vector h = diff / e;
  const double eps = spec.epsilon;
  const Vector apex = ar + eps * e * h;

  const Vector& base = correction.robot_action;
  const Vector positive = scatter(base, ah, dims);

  ContrastivePairSet pairs;
  pairs.reserve(static_cast<std::size_t>(spec.n_implicit) + 1);
  if (eps > 0.0) {
    pairs.push_back({base, scatter(base, apex, dims), true});
  }
  for (const Vector& hn :
       sample_negative_directions(h, spec.alpha_deg, spec.n_implicit, rng)) {
    const Vector negative = apex + (1.0 - eps) * e * hn;
    pairs.push_back({scatter(base, negative, dims), positive, false});
  }
  return pairs;
}

bool halfspace_membership(const Vector& a, const Vector& negative,
                          const Vector& positive) {
  return (a - negative).norm() >= (a - positive).norm();
}

double tempered_sigmoid(double x, double temperature) {
  const double z = x / temperature;
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double ez = std::exp(z);
  return ez / (1.0 + ez);
}

double obs_prob_halfspace(const Vector& a, const Vector& negative,
                          const Vector& positive, double temperature) {
  if (!(temperature > 0.0)) throw UsageError("observation model: T must be > 0");
  return tempered_sigmoid((a - negative).norm() - (a - positive).norm(),
                          temperature);
}

double obs_prob_polytope(const Vector& a, const ContrastivePairSet& pairs,
                         double temperature) {
  if (pairs.empty()) throw UsageError("obs_prob_polytope: empty pair set");
  double p = 1.0;
  for (const auto& pair : pairs) {
    p *= obs_prob_halfspace(a, pair.negative, pair.positive, temperature);
  }
  return p;
}

double obs_prob_circular(const Vector& a, const Vector& robot_action,
                         const Vector& human_action, double epsilon,
                         double temperature) {
  if (!(temperature > 0.0)) throw UsageError("observation model: T must be > 0");
  const double radius = (1.0 - epsilon) * (robot_action - human_action).norm();
  return tempered_sigmoid(radius - (a - human_action).norm(), temperature);
}

DesiredSpace DesiredSpace::polytope(ContrastivePairSet pairs, double temperature) {
  if (pairs.empty()) throw UsageError("desired space: empty pair set");
  if (!(temperature > 0.0)) throw ConfigError("desired space: temperature must be > 0");
  return DesiredSpace(Polytope{std::move(pairs)}, temperature);
}

DesiredSpace DesiredSpace::ball(Vector center, double radius, double temperature) {
  if (radius < 0.0) throw UsageError("desired space: negative radius");
  if (!(temperature > 0.0)) throw ConfigError("desired space: temperature must be > 0");
  return DesiredSpace(Ball{std::move(center), radius}, temperature);
}

DesiredSpace DesiredSpace::build(const ObservedCorrection& correction,
                                 const DesiredSpaceSpec& spec,
                                 std::mt19937_64& rng) {
  spec.validate();
  if (const auto* p = std::get_if<PolytopeSpec>(&spec.geometry)) {
    return polytope(make_pairs_polytope(correction, *p, rng), spec.temperature);
  }
  correction.validate();
  if (correction.kind != CorrectionKind::kAbsolute) {
    throw ConfigError(std::string("circular desired spaces need absolute "
                                  "corrections, got ") +
                      std::string(to_string(correction.kind)));
  }
  const auto& c = std::get<CircularSpec>(spec.geometry);
  const double radius =
      (1.0 - c.epsilon) * (correction.robot_action - correction.human_action).norm();
  return ball(correction.human_action, radius, spec.temperature);
}

double DesiredSpace::probability(const Vector& a) const {
  Matrix row(1, a.size());
  row.row(0) = a.transpose();
  return probabilities(row)(0);
}

Vector DesiredSpace::probabilities(const Matrix& actions) const {
  const double t = temperature_;
  auto sig = [t](double x) { return tempered_sigmoid(x, t); };
  if (const auto* poly = std::get_if<Polytope>(&geometry_)) {
    Vector p = Vector::Ones(actions.rows());
    for (const auto& pair : poly->pairs) {
      const Vector margin =
          row_distances(actions, pair.negative) - row_distances(actions, pair.positive);
      p.array() *= margin.unaryExpr(sig).array();
    }
    return p;
  }
  const auto& ball = std::get<Ball>(geometry_);
  const Vector margin =
      (ball.radius - row_distances(actions, ball.center).array()).matrix();
  return margin.unaryExpr(sig);
}

bool DesiredSpace::contains(const Vector& a) const {
  if (const auto* poly = std::get_if<Polytope>(&geometry_)) {
    for (const auto& pair : poly->pairs) {
      if (!halfspace_membership(a, pair.negative, pair.positive)) return false;
    }
    return true;
  }
  const auto& ball = std::get<Ball>(geometry_);
  return (a - ball.center).norm() <= ball.radius;
}

std::vector<bool> DesiredSpace::contains_rows(const Matrix& actions) const {
  std::vector<bool> inside(static_cast<std::size_t>(actions.rows()));
  for (Eigen::Index r = 0; r < actions.rows(); ++r) {
    inside[static_cast<std::size_t>(r)] = contains(actions.row(r).transpose());
  }
  return inside;
}

}  // namespace clic::desired_space
