#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace clic::envs {

struct StepRecord {
  int step = 0;  // 1-based
  Eigen::VectorXd state;
  Eigen::VectorXd robot_action;
  std::optional<Eigen::VectorXd> human_action;
};

struct EpisodeRecord {
  int episode = 0;
  std::vector<StepRecord> steps;
  bool success = false;

  int step_count() const { return static_cast<int>(steps.size()); }
};

// One JSON object per line, one line per step:
// {"episode":0,"step":1,"state":[...],"robot_action":[...],
//  "human_action":[...]|null,"success":false,"last":false}
void write_episode_jsonl(std::ostream& out, const EpisodeRecord& record);

// Reads every episode from a stream written by write_episode_jsonl.
// Throws UsageError on malformed lines.
std::vector<EpisodeRecord> read_episodes_jsonl(std::istream& in);

}  // namespace clic::envs
