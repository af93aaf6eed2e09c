#include "clic/trainer/metrics.hpp"

#include <iomanip>
#include <numeric>
#include <ostream>

#include "clic/error.hpp"

namespace clic::trainer {

void MetricsLog::add_eval(const EvalPoint& point) {
  if (!evals.empty() && point.timestep <= evals.back().timestep) {
    throw UsageError("MetricsLog: evaluation timesteps must increase");
  }
  evals.push_back(point);
}

int MetricsLog::total_feedback() const {
  return std::accumulate(feedback_per_episode.begin(), feedback_per_episode.end(), 0);
}

double final_success_rate(const MetricsLog& log, int window) {
  if (log.evals.empty()) return 0.0;
  if (window < 1) throw UsageError("final_success_rate: window must be >= 1");
  const std::size_t k = std::min<std::size_t>(window, log.evals.size());
  double sum = 0.0;
  for (std::size_t i = log.evals.size() - k; i < log.evals.size(); ++i) {
    sum += log.evals[i].success_rate;
  }
  return sum / static_cast<double>(k);
}

std::optional<std::int64_t> convergence_timestep(const MetricsLog& log, int window) {
  if (log.evals.size() < 2) throw UsageError("convergence_timestep: need at least two evaluations");
  const double final_rate = final_success_rate(log, window);
  if (final_rate <= 0.0) return std::nullopt;
  for (const auto& e : log.evals) {
    if (e.success_rate >= 0.9 * final_rate) return e.timestep;
  }
  return std::nullopt;
}

void write_metrics_csv(std::ostream& out, const MetricsLog& log) {
  out << "timestep,success_rate\n";
  out << std::setprecision(17);
  for (const auto& e : log.evals) out << e.timestep << ',' << e.success_rate << '\n';
}

nlohmann::json metrics_summary(const MetricsLog& log) {
  nlohmann::json j;
  j["final_success_rate"] = final_success_rate(log);
  std::optional<std::int64_t> conv;
  if (log.evals.size() >= 2) conv = convergence_timestep(log);
  j["convergence_timestep"] = conv ? nlohmann::json(*conv) : nlohmann::json(nullptr);
  j["feedback_total"] = log.total_feedback();
  j["feedback_per_episode"] = log.feedback_per_episode;
  j["updates_per_episode"] = log.updates_per_episode;
  j["episodes"] = log.episodes_run;
  j["total_timesteps"] = log.total_timesteps;
  j["clipped_actions"] = log.clipped_actions;
  j["evaluations"] = log.evals.size();
  j["aborted"] = log.aborted;
  if (log.aborted) j["abort_reason"] = log.abort_reason;
  return j;
}

}  // namespace clic::trainer
