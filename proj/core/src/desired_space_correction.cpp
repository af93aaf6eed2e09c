#include "clic/desired_space/correction.hpp"

#include <string>

#include "clic/error.hpp"

namespace clic::desired_space {

std::string_view to_string(CorrectionKind kind) {
  switch (kind) {
    case CorrectionKind::kAbsolute: return "absolute";
    case CorrectionKind::kRelative: return "relative";
    case CorrectionKind::kPartial: return "partial";
  }
  return "unknown";
}

CorrectionKind parse_correction_kind(std::string_view name) {
  if (name == "absolute") return CorrectionKind::kAbsolute;
  if (name == "relative") return CorrectionKind::kRelative;
  if (name == "partial") return CorrectionKind::kPartial;
  throw UsageError("unknown correction kind: " + std::string(name));
}

void ObservedCorrection::validate() const {
  const auto dim = robot_action.size();
  if (dim == 0 || human_action.size() != dim) {
    throw UsageError("correction: action dimensions disagree");
  }
  if ((robot_action - human_action).norm() == 0.0) {
    throw UsageError("correction: a^r equals a^h");
  }
  if (!robot_action.allFinite() || !human_action.allFinite() ||
      !state.allFinite()) {
    throw UsageError("correction: non-finite values");
  }
  constexpr double kTol = 1e-12;
  if ((robot_action.array().abs() > 1.0 + kTol).any() ||
      (human_action.array().abs() > 1.0 + kTol).any()) {
    throw UsageError("correction: actions must lie in [-1, 1]");
  }
  if ((kind == CorrectionKind::kPartial) != mask.has_value()) {
    throw UsageError("correction: mask must be present exactly for partial feedback");
  }
  if (mask) {
    if (static_cast<Eigen::Index>(mask->size()) != dim) {
      throw UsageError("correction: mask length differs from action dimension");
    }
    bool any = false;
    for (bool m : *mask) any = any || m;
    if (!any) throw UsageError("correction: partial mask selects no dimension");
  }
}

}  // namespace clic::desired_space
