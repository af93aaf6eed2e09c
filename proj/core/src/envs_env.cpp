#include "clic/envs/env.hpp"

#include <array>
#include <string>

#include "clic/error.hpp"

namespace clic::envs {
namespace {

constexpr std::array<std::pair<EnvKind, std::string_view>, 5> kNames{{
    {EnvKind::kPointReach2D, "PointReach2D"},
    {EnvKind::kTwoGoal2D, "TwoGoal2D"},
    {EnvKind::kDualPointReach4D, "DualPointReach4D"},
    {EnvKind::kToyConstant2D, "ToyConstant2D"},
    {EnvKind::kToyMulti2D, "ToyMulti2D"},
}};

Eigen::Vector2d uniform2(std::mt19937_64& rng, double ylo = -1.0, double yhi = 1.0) {
  std::uniform_real_distribution<double> ux(-1.0, 1.0);
  std::uniform_real_distribution<double> uy(ylo, yhi);
  const double x = ux(rng);
  return {x, uy(rng)};
}

void check_state(EnvKind kind, const Vector& s) {
  if (s.size() != env_dims(kind).state_dim || !s.allFinite()) {
    throw UsageError("env: malformed state for " + std::string(to_string(kind)));
  }
}

}  // namespace

std::string_view to_string(EnvKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  throw InternalError("unknown EnvKind");
}

EnvKind parse_env_kind(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  throw ConfigError("unknown environment: " + std::string(name));
}

EnvDims env_dims(EnvKind kind) {
  switch (kind) {
    case EnvKind::kPointReach2D: return {4, 2};
    case EnvKind::kTwoGoal2D: return {6, 2};
    case EnvKind::kDualPointReach4D: return {8, 4};
    case EnvKind::kToyConstant2D:
    case EnvKind::kToyMulti2D: return {1, 2};
  }
  throw InternalError("unknown EnvKind");
}

bool is_toy(EnvKind kind) {
  return kind == EnvKind::kToyConstant2D || kind == EnvKind::kToyMulti2D;
}

int env_horizon(EnvKind kind) { return is_toy(kind) ? 1 : kHorizon; }

Vector env_reset(EnvKind kind, std::mt19937_64& rng) {
  Vector s(env_dims(kind).state_dim);
  switch (kind) {
    case EnvKind::kPointReach2D: {
      const Eigen::Vector2d agent = uniform2(rng);
      Eigen::Vector2d goal;
      do {
        goal = uniform2(rng);
      } while ((goal - agent).norm() < kMinResetSeparation);
      s << agent, goal;
      return s;
    }
    case EnvKind::kTwoGoal2D:
      s << uniform2(rng, -1.0, 0.0), -0.5, 0.5, 0.5, 0.5;
      return s;
    case EnvKind::kDualPointReach4D: {
      std::array<Eigen::Vector2d, 2> agents, goals;
      for (int i = 0; i < 2; ++i) {
        agents[i] = uniform2(rng);
        do {
          goals[i] = uniform2(rng);
        } while ((goals[i] - agents[i]).norm() < kMinResetSeparation);
      }
      s << agents[0], agents[1], goals[0], goals[1];
      return s;
    }
    case EnvKind::kToyConstant2D:
    case EnvKind::kToyMulti2D:
      s << 0.0;
      return s;
  }
  throw InternalError("unknown EnvKind");
}

bool at_goal(EnvKind kind, const Vector& s) {
  check_state(kind, s);
  switch (kind) {
    case EnvKind::kPointReach2D:
      return (s.segment<2>(0) - s.segment<2>(2)).norm() <= kGoalRadius;
    case EnvKind::kTwoGoal2D:
      return (s.segment<2>(0) - s.segment<2>(2)).norm() <= kGoalRadius ||
             (s.segment<2>(0) - s.segment<2>(4)).norm() <= kGoalRadius;
    case EnvKind::kDualPointReach4D:
      return (s.segment<2>(0) - s.segment<2>(4)).norm() <= kGoalRadius &&
             (s.segment<2>(2) - s.segment<2>(6)).norm() <= kGoalRadius;
    case EnvKind::kToyConstant2D:
    case EnvKind::kToyMulti2D: return false;
  }
  return false;
}

StepOutcome env_step(EnvKind kind, const Vector& state, const Vector& action) {
  check_state(kind, state);
  const int adim = env_dims(kind).action_dim;
  if (action.size() != adim || !action.allFinite()) {
    throw UsageError("env_step: malformed action");
  }
  StepOutcome out;
  const Vector a = action.cwiseMax(-1.0).cwiseMin(1.0);
  out.action_clipped = (a.array() != action.array()).any();
  out.state = state;
  switch (kind) {
    case EnvKind::kPointReach2D:
    case EnvKind::kTwoGoal2D:
    case EnvKind::kDualPointReach4D:
      out.state.head(adim) = (state.head(adim) + kStepDt * a).cwiseMax(-1.0).cwiseMin(1.0);
      out.success = at_goal(kind, out.state);
      break;
    case EnvKind::kToyConstant2D:
      out.success = a.norm() <= kToyRadius;
      break;
    case EnvKind::kToyMulti2D: {
      const Eigen::Vector2d left(-0.5, 0.0), right(0.5, 0.0);
      out.success = (a - left).norm() <= kToyRadius || (a - right).norm() <= kToyRadius;
      break;
    }
  }
  return out;
}

const Vector& Env::reset(std::mt19937_64& rng) {
  state_ = env_reset(kind_, rng);
  steps_ = 0;
  done_ = false;
  success_ = false;
  return state_;
}

StepOutcome Env::step(const Vector& action) {
  if (done_) throw UsageError("Env::step called on a finished episode");
  StepOutcome out = env_step(kind_, state_, action);
  state_ = out.state;
  ++steps_;
  if (out.action_clipped) ++clipped_;
  success_ = out.success;
  done_ = out.success || steps_ >= env_horizon(kind_);
  return out;
}

}  // namespace clic::envs
