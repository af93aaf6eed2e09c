#pragma once

#include <random>
#include <string_view>

#include <Eigen/Dense>

namespace clic::envs {

using Vector = Eigen::VectorXd;

// State layouts (positions are 2D):
//   PointReach2D      [agent, goal]
//   TwoGoal2D         [agent, goal1, goal2]
//   DualPointReach4D  [agent1, agent2, goal1, goal2]; action [a1, a2]
//   ToyConstant2D     [0]; single step, optimum (0, 0)
//   ToyMulti2D        [0]; single step, optima (-0.5, 0) and (0.5, 0)
enum class EnvKind { kPointReach2D, kTwoGoal2D, kDualPointReach4D, kToyConstant2D, kToyMulti2D };

std::string_view to_string(EnvKind kind);
EnvKind parse_env_kind(std::string_view name);

struct EnvDims {
  int state_dim;
  int action_dim;
};
EnvDims env_dims(EnvKind kind);

inline constexpr double kStepDt = 0.05;
inline constexpr double kGoalRadius = 0.05;
inline constexpr double kToyRadius = 0.1;
inline constexpr int kHorizon = 50;
inline constexpr double kMinResetSeparation = 0.3;

bool is_toy(EnvKind kind);
int env_horizon(EnvKind kind);  // 1 for the toy problems

Vector env_reset(EnvKind kind, std::mt19937_64& rng);

struct StepOutcome {
  Vector state;
  bool success = false;
  bool action_clipped = false;  // the action left [-1, 1] and was clipped
};

// One transition. Navigation tasks judge success on the next state; the toy
// problems judge the action itself.
StepOutcome env_step(EnvKind kind, const Vector& state, const Vector& action);

// Navigation success predicate on a state. Always false for toy problems.
bool at_goal(EnvKind kind, const Vector& state);

// Episode wrapper with the horizon and clip counter.
class Env {
 public:
  explicit Env(EnvKind kind) : kind_(kind) {}

  const Vector& reset(std::mt19937_64& rng);
  StepOutcome step(const Vector& action);

  EnvKind kind() const { return kind_; }
  const Vector& state() const { return state_; }
  int steps() const { return steps_; }
  bool done() const { return done_; }
  bool success() const { return success_; }
  int clipped_actions() const { return clipped_; }

 private:
  EnvKind kind_;
  Vector state_;
  int steps_ = 0;
  bool done_ = true;
  bool success_ = false;
  int clipped_ = 0;
};

}  // namespace clic::envs
