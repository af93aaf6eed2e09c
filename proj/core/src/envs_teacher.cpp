#include "clic/envs/teacher.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "clic/desired_space/geometry.hpp"
#include "clic/error.hpp"

namespace clic::envs {
namespace {

constexpr std::array<std::pair<FeedbackType, std::string_view>, 5> kNames{{
    {FeedbackType::kAccurateAbsolute, "accurate_absolute"},
    {FeedbackType::kGaussianNoise, "gaussian_noise"},
    {FeedbackType::kPartial, "partial"},
    {FeedbackType::kAccurateRelative, "accurate_relative"},
    {FeedbackType::kDirectionNoise, "direction_noise"},
}};

constexpr double kSame = 1e-9;

Vector clip(const Vector& a) { return a.cwiseMax(-1.0).cwiseMin(1.0); }

Eigen::Vector2d reach(const Vector& s, int agent, int goal) {
  return (kExpertGain * (s.segment<2>(goal) - s.segment<2>(agent))).cwiseMax(-1.0).cwiseMin(1.0);
}

// Dimension groups that make up one sub-agent's action.
std::vector<std::vector<int>> sub_agents(int action_dim) {
  if (action_dim == 4) return {{0, 1}, {2, 3}};
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < action_dim; ++i) groups.push_back({i});
  return groups;
}

}  // namespace

std::string_view to_string(FeedbackType type) {
  for (const auto& [t, name] : kNames) {
    if (t == type) return name;
  }
  throw InternalError("unknown FeedbackType");
}

FeedbackType parse_feedback_type(std::string_view name) {
  for (const auto& [t, n] : kNames) {
    if (n == name) return t;
  }
  throw ConfigError("unknown feedback type: " + std::string(name));
}

desired_space::CorrectionKind correction_kind(FeedbackType type) {
  switch (type) {
    case FeedbackType::kAccurateAbsolute:
    case FeedbackType::kGaussianNoise: return desired_space::CorrectionKind::kAbsolute;
    case FeedbackType::kPartial: return desired_space::CorrectionKind::kPartial;
    case FeedbackType::kAccurateRelative:
    case FeedbackType::kDirectionNoise: return desired_space::CorrectionKind::kRelative;
  }
  throw InternalError("unknown FeedbackType");
}

void TeacherConfig::validate() const {
  if (!(noise_lambda >= 0.0)) throw ConfigError("teacher: lambda must be >= 0");
  if (!(beta_deg >= 0.0 && beta_deg < 90.0)) throw ConfigError("teacher: beta must be in [0, 90)");
  if (!(magnitude > 0.0)) throw ConfigError("teacher: magnitude e must be > 0");
  if (!(threshold > 0.0)) throw ConfigError("teacher: threshold must be > 0");
  if (cadence < 1) throw ConfigError("teacher: cadence must be >= 1");
}

Vector teacher_optimal_action(EnvKind kind, const Vector& s, const Vector* robot_action) {
  if (s.size() != env_dims(kind).state_dim) throw UsageError("teacher: malformed state");
  Vector a(env_dims(kind).action_dim);
  switch (kind) {
    case EnvKind::kPointReach2D:
      a = reach(s, 0, 2);
      return a;
    case EnvKind::kTwoGoal2D: {
      const double d1 = (s.segment<2>(2) - s.segment<2>(0)).norm();
      const double d2 = (s.segment<2>(4) - s.segment<2>(0)).norm();
      a = reach(s, 0, d2 < d1 ? 4 : 2);
      return a;
    }
    case EnvKind::kDualPointReach4D:
      a << reach(s, 0, 4), reach(s, 2, 6);
      return a;
    case EnvKind::kToyConstant2D:
      a.setZero();
      return a;
    case EnvKind::kToyMulti2D: {
      a << -0.5, 0.0;
      if (robot_action && robot_action->size() == 2 && (*robot_action)(0) > 0.0) a(0) = 0.5;
      return a;
    }
  }
  throw InternalError("unknown EnvKind");
}

Vector rotate_direction(const Vector& h, double beta_deg, std::mt19937_64& rng) {
  if (beta_deg == 0.0) return h;
  if (h.size() == 2) {
    const double beta = beta_deg * std::numbers::pi / 180.0;
    const double sign = std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;
    const double c = std::cos(beta), s = sign * std::sin(beta);
    Vector r(2);
    r << c * h(0) - s * h(1), s * h(0) + c * h(1);
    return r;
  }
  return desired_space::sample_negative_directions(h, beta_deg, 1, rng).front();
}

SimulatedTeacher::SimulatedTeacher(EnvKind kind, TeacherConfig config)
    : kind_(kind), config_(config), rng_(config.seed) {
  config_.validate();
}

std::optional<ObservedCorrection> SimulatedTeacher::feedback(const Vector& state,
                                                             const Vector& ar,
                                                             int step_index) {
  if (step_index % config_.cadence != 0) return std::nullopt;
  const Vector optimal = teacher_optimal_action(kind_, state, &ar);
  const Vector diff = optimal - ar;
  const double dist = diff.norm();
  if (!(dist > config_.threshold)) return std::nullopt;

  ObservedCorrection corr;
  corr.state = state;
  corr.robot_action = ar;
  corr.kind = correction_kind(config_.type);
  switch (config_.type) {
    case FeedbackType::kAccurateAbsolute:
      corr.human_action = optimal;
      break;
    case FeedbackType::kGaussianNoise: {
      const double scale = config_.lambda_is_variance
                               ? std::sqrt(config_.noise_lambda) * dist
                               : config_.noise_lambda * dist;
      std::normal_distribution<double> n(0.0, 1.0);
      Vector noisy = optimal;
      for (Eigen::Index i = 0; i < noisy.size(); ++i) noisy(i) += scale * n(rng_);
      corr.human_action = clip(noisy);
      break;
    }
    case FeedbackType::kPartial: {
      const auto groups = sub_agents(static_cast<int>(ar.size()));
      // Alternate sub-agents; skip one whose action already matches.
      for (std::size_t tries = 0; tries < groups.size(); ++tries) {
        const auto& g = groups[partial_cursor_ % groups.size()];
        ++partial_cursor_;
        double part = 0.0;
        for (int d : g) part += diff(d) * diff(d);
        if (std::sqrt(part) <= kSame) continue;
        std::vector<bool> mask(ar.size(), false);
        corr.human_action = ar;
        for (int d : g) {
          mask[d] = true;
          corr.human_action(d) = optimal(d);
        }
        corr.mask = std::move(mask);
        break;
      }
      if (!corr.mask) return std::nullopt;
      break;
    }
    case FeedbackType::kAccurateRelative:
    case FeedbackType::kDirectionNoise: {
      Vector h = diff / dist;
      if (config_.type == FeedbackType::kDirectionNoise) {
        h = rotate_direction(h, config_.beta_deg, rng_);
      }
      corr.human_action = clip(ar + config_.magnitude * h);
      break;
    }
  }
  if ((corr.human_action - ar).norm() <= kSame) return std::nullopt;
  return corr;
}

}  // namespace clic::envs
