#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace clic::trainer {

struct EvalPoint {
  std::int64_t timestep = 0;  // training env steps so far
  int episode = 0;
  double success_rate = 0.0;
};

struct MetricsLog {
  std::vector<EvalPoint> evals;          // timesteps strictly increasing
  std::vector<int> feedback_per_episode;
  std::vector<int> updates_per_episode;
  std::int64_t total_timesteps = 0;
  int episodes_run = 0;
  int clipped_actions = 0;
  bool aborted = false;
  std::string abort_reason;

  // Appends, enforcing strictly increasing timesteps (UsageError otherwise).
  void add_eval(const EvalPoint& point);
  int total_feedback() const;
};

inline constexpr int kFinalWindow = 3;

// Mean success rate of the last `window` evaluations (fewer if not available).
double final_success_rate(const MetricsLog& log, int window = kFinalWindow);

// Earliest evaluation timestep whose success rate is >= 0.9 * final; none when
// the final rate is 0. Needs at least two evaluations (UsageError).
std::optional<std::int64_t> convergence_timestep(const MetricsLog& log,
                                                 int window = kFinalWindow);

// CSV with header "timestep,success_rate".
void write_metrics_csv(std::ostream& out, const MetricsLog& log);
nlohmann::json metrics_summary(const MetricsLog& log);

}  // namespace clic::trainer
