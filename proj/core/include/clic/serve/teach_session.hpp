#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clic/trainer/run.hpp"

namespace clic::serve {

using nlohmann::json;

// Protocol logic of the teaching service, independent of any transport.
// Drives the same IilSession as the batch trainer; human corrections replace
// the scripted teacher.
//
// client -> server
//   {"type":"feedback","kind":"absolute"|"relative","vector":[...]}
//   {"type":"control","cmd":"pause"|"resume"|"reset"|"train_now"|"set_method",
//    "method":"..."}
//   {"type":"landscape","resolution":int}
// server -> client
//   {"type":"state",...}, {"type":"metrics",...}, {"type":"landscape",...},
//   {"type":"error","msg":"..."}, {"type":"ack","cmd":"..."}
class TeachSession {
 public:
  explicit TeachSession(trainer::ExperimentConfig config);

  // Advances one environment step unless paused. A finished episode is
  // closed with end-of-episode training before the next one starts.
  // Returns frames for every client.
  std::vector<json> tick();

  struct Reply {
    std::vector<json> to_sender;
    std::vector<json> to_all;
  };
  // Never throws on bad input: malformed frames produce an error frame.
  Reply handle_message(const std::string& text);

  bool paused() const { return paused_; }
  const trainer::IilSession& session() const { return session_; }
  const std::vector<double>& eval_history() const { return eval_history_; }

  json state_frame() const;

 private:
  Reply handle_feedback(const json& msg);
  Reply handle_control(const json& msg);
  Reply handle_landscape(const json& msg);
  json close_episode();

  trainer::IilSession session_;
  bool paused_ = false;
  bool started_ = false;
  // Last executed step, which incoming corrections refer to.
  std::optional<trainer::IilSession::StepInfo> last_;
  std::vector<double> eval_history_;
};

json error_frame(const std::string& msg);

}  // namespace clic::serve
