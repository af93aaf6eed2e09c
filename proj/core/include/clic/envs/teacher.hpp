#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

#include "clic/desired_space/correction.hpp"
#include "clic/envs/env.hpp"

namespace clic::envs {

using desired_space::ObservedCorrection;

enum class FeedbackType {
  kAccurateAbsolute,
  kGaussianNoise,
  kPartial,
  kAccurateRelative,
  kDirectionNoise,
};

std::string_view to_string(FeedbackType type);
FeedbackType parse_feedback_type(std::string_view name);
// Correction kind a feedback type produces.
desired_space::CorrectionKind correction_kind(FeedbackType type);

struct TeacherConfig {
  FeedbackType type = FeedbackType::kAccurateAbsolute;
  double noise_lambda = 0.5;
  // true: lambda * |a* - a^r|^2 is the variance; false: it is the std dev.
  bool lambda_is_variance = true;
  double beta_deg = 45.0;   // direction noise angle, [0, 90)
  double magnitude = 0.2;   // e for relative kinds
  double threshold = 0.2;   // feedback only when |a* - a^r| exceeds this
  int cadence = 2;          // feedback only on steps that are multiples of n
  std::uint64_t seed = 0;

  void validate() const;
};

// Scripted expert with gain 4. ToyMulti2D picks the optimum nearer to
// `robot_action` (the left one on ties, or when no action is given).
inline constexpr double kExpertGain = 4.0;
Vector teacher_optimal_action(EnvKind kind, const Vector& state,
                              const Vector* robot_action = nullptr);

// Rotates unit `h` by exactly beta: random sign in 2D, uniform on the cone
// in higher dimensions.
Vector rotate_direction(const Vector& h, double beta_deg, std::mt19937_64& rng);

// Stateful teacher: owns its rng and the partial-feedback cursor.
class SimulatedTeacher {
 public:
  SimulatedTeacher(EnvKind kind, TeacherConfig config);

  // step_index is 1-based within the episode.
  std::optional<ObservedCorrection> feedback(const Vector& state,
                                             const Vector& robot_action,
                                             int step_index);

  const TeacherConfig& config() const { return config_; }

 private:
  EnvKind kind_;
  TeacherConfig config_;
  std::mt19937_64 rng_;
  int partial_cursor_ = 0;
};

}  // namespace clic::envs
