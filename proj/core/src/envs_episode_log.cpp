#include "clic/envs/episode_log.hpp"

#include <istream>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "clic/error.hpp"

namespace clic::envs {
namespace {

using nlohmann::json;

json to_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<Eigen::Index>(values.size()));
}

}  // namespace

void write_episode_jsonl(std::ostream& out, const EpisodeRecord& record) {
  for (std::size_t i = 0; i < record.steps.size(); ++i) {
    const auto& s = record.steps[i];
    json line{{"episode", record.episode},
              {"step", s.step},
              {"state", to_json(s.state)},
              {"robot_action", to_json(s.robot_action)},
              {"human_action", s.human_action ? to_json(*s.human_action) : json(nullptr)},
              {"success", record.success},
              {"last", i + 1 == record.steps.size()}};
    out << line.dump() << '\n';
  }
}

std::vector<EpisodeRecord> read_episodes_jsonl(std::istream& in) {
  std::vector<EpisodeRecord> episodes;
  std::string text;
  int lineno = 0;
  bool open = false;
  while (std::getline(in, text)) {
    ++lineno;
    if (text.empty()) continue;
    try {
      const json line = json::parse(text);
      const int episode = line.at("episode").get<int>();
      if (!open || episodes.back().episode != episode) {
        episodes.push_back(EpisodeRecord{episode, {}, false});
        open = true;
      }
      StepRecord step;
      step.step = line.at("step").get<int>();
      step.state = from_json(line.at("state"));
      step.robot_action = from_json(line.at("robot_action"));
      if (!line.at("human_action").is_null()) step.human_action = from_json(line.at("human_action"));
      episodes.back().steps.push_back(std::move(step));
      episodes.back().success = line.at("success").get<bool>();
      if (line.value("last", false)) open = false;
    } catch (const json::exception& e) {
      throw UsageError("episode log line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return episodes;
}

}  // namespace clic::envs
