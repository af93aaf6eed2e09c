#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace clic::desired_space {

using Vector = Eigen::VectorXd;

enum class CorrectionKind { kAbsolute, kRelative, kPartial };

std::string_view to_string(CorrectionKind kind);
CorrectionKind parse_correction_kind(std::string_view name);

// One observed action pair (a^r, a^h) at state s.
struct ObservedCorrection {
  Vector state;
  Vector robot_action;
  Vector human_action;
  CorrectionKind kind = CorrectionKind::kAbsolute;
  // Present iff kind == kPartial; true marks dimensions the teacher corrected.
  std::optional<std::vector<bool>> mask;

  // Throws UsageError if a^r == a^h, actions leave [-1, 1], dimensions
  // disagree, or the mask presence does not match the kind.
  void validate() const;
};

}  // namespace clic::desired_space
