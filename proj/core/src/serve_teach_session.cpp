#include "clic/serve/teach_session.hpp"

#include "clic/error.hpp"
#include "clic/trainer/landscape.hpp"

namespace clic::serve {
namespace {

json vec(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json render_info(envs::EnvKind kind, const Eigen::VectorXd& s) {
  json r;
  switch (kind) {
    case envs::EnvKind::kPointReach2D:
      r["agents"] = {vec(s.segment<2>(0))};
      r["goals"] = {vec(s.segment<2>(2))};
      break;
    case envs::EnvKind::kTwoGoal2D:
      r["agents"] = {vec(s.segment<2>(0))};
      r["goals"] = {vec(s.segment<2>(2)), vec(s.segment<2>(4))};
      break;
    case envs::EnvKind::kDualPointReach4D:
      r["agents"] = {vec(s.segment<2>(0)), vec(s.segment<2>(2))};
      r["goals"] = {vec(s.segment<2>(4)), vec(s.segment<2>(6))};
      break;
    default:
      r["agents"] = json::array();
      r["goals"] = json::array();
  }
  r["goal_radius"] = envs::kGoalRadius;
  return r;
}

}  // namespace

json error_frame(const std::string& msg) { return {{"type", "error"}, {"msg", msg}}; }

// The first episode opens immediately so a client that connects before the
// first tick still sees a real state.
TeachSession::TeachSession(trainer::ExperimentConfig config) : session_(std::move(config)) {
  session_.begin_episode();
  started_ = true;
}

json TeachSession::state_frame() const {
  const auto& env = session_.env();
  json frame{{"type", "state"},
             {"episode", session_.episode()},
             {"step", env.steps()},
             {"state", vec(env.state())},
             {"robot_action", last_ ? vec(last_->robot_action) : json::array()},
             {"paused", paused_},
             {"done", env.done()},
             {"success", env.success()}};
  frame["render"] = env.state().size() ? render_info(env.kind(), env.state()) : json::object();
  return frame;
}

json TeachSession::close_episode() {
  const int updates = session_.end_episode();
  json metrics{{"type", "metrics"},
               {"episode", session_.episode()},
               {"success", session_.env().success()},
               {"feedback", session_.episode_feedback()},
               {"updates", session_.episode_updates()},
               {"end_of_episode_updates", updates},
               {"buffer", session_.buffer().size()},
               {"timesteps", session_.timesteps()}};
  const int every = session_.config().eval_every;
  if (every > 0 && (session_.episode() == 1 || session_.episode() % every == 0)) {
    const double rate = session_.evaluate_now(session_.config().eval_rollouts);
    eval_history_.push_back(rate);
    metrics["success_rate"] = rate;
  }
  return metrics;
}

std::vector<json> TeachSession::tick() {
  std::vector<json> out;
  if (paused_) return out;
  if (!started_ || session_.env().done()) {
    if (started_) out.push_back(close_episode());
    session_.begin_episode();
    last_.reset();
    started_ = true;
  }
  last_ = session_.step(nullptr);
  out.push_back(state_frame());
  return out;
}

TeachSession::Reply TeachSession::handle_message(const std::string& text) {
  json msg;
  try {
    msg = json::parse(text);
  } catch (const json::exception&) {
    return {{error_frame("malformed JSON")}, {}};
  }
  if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
    return {{error_frame("frame needs a string 'type'")}, {}};
  }
  const std::string type = msg["type"];
  try {
    if (type == "feedback") return handle_feedback(msg);
    if (type == "control") return handle_control(msg);
    if (type == "landscape") return handle_landscape(msg);
  } catch (const json::exception& e) {
    return {{error_frame(std::string("bad frame: ") + e.what())}, {}};
  } catch (const std::invalid_argument& e) {
    return {{error_frame(e.what())}, {}};
  } catch (const NumericError& e) {
    return {{error_frame(std::string("training diverged: ") + e.what())}, {}};
  }
  return {{error_frame("unknown frame type '" + type + "'")}, {}};
}

TeachSession::Reply TeachSession::handle_feedback(const json& msg) {
  if (!last_) return {{error_frame("no executed step to correct yet")}, {}};
  const std::string kind = msg.at("kind").get<std::string>();
  const auto values = msg.at("vector").get<std::vector<double>>();
  const Eigen::VectorXd& ar = last_->robot_action;
  if (static_cast<Eigen::Index>(values.size()) != ar.size()) {
    return {{error_frame("feedback vector has the wrong dimension")}, {}};
  }
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(values.data(), ar.size());
  if (!v.allFinite()) return {{error_frame("feedback vector is not finite")}, {}};

  desired_space::ObservedCorrection corr;
  corr.state = last_->state;
  corr.robot_action = ar;
  if (kind == "absolute") {
    corr.kind = desired_space::CorrectionKind::kAbsolute;
    corr.human_action = v.cwiseMax(-1.0).cwiseMin(1.0);
  } else if (kind == "relative") {
    if (session_.config().method == trainer::Method::kClicCircular) {
      return {{error_frame("clic_circular accepts absolute feedback only")}, {}};
    }
    const double norm = v.norm();
    if (norm == 0.0) return {{error_frame("relative feedback needs a non-zero vector")}, {}};
    corr.kind = desired_space::CorrectionKind::kRelative;
    corr.human_action =
        (ar + session_.config().teacher.magnitude * v / norm).cwiseMax(-1.0).cwiseMin(1.0);
  } else {
    return {{error_frame("feedback kind must be 'absolute' or 'relative'")}, {}};
  }
  if ((corr.human_action - ar).norm() == 0.0) {
    return {{error_frame("correction equals the robot action")}, {}};
  }
  const bool updated = session_.ingest_feedback(std::move(corr));
  return {{json{{"type", "ack"}, {"cmd", "feedback"}, {"updated", updated},
                {"buffer", session_.buffer().size()}}},
          {}};
}

TeachSession::Reply TeachSession::handle_control(const json& msg) {
  const std::string cmd = msg.at("cmd").get<std::string>();
  const json ack{{"type", "ack"}, {"cmd", cmd}};
  if (cmd == "pause") {
    paused_ = true;
  } else if (cmd == "resume") {
    paused_ = false;
  } else if (cmd == "reset") {
    session_.begin_episode();
    last_.reset();
    started_ = true;
    return {{ack}, {state_frame()}};
  } else if (cmd == "train_now") {
    const int n = session_.end_episode();
    return {{json{{"type", "ack"}, {"cmd", cmd}, {"updates", n}}}, {}};
  } else if (cmd == "set_method") {
    auto config = session_.config();
    config.method = trainer::parse_method(msg.at("method").get<std::string>());
    if (config.method == trainer::Method::kClicCircular) {
      config.space.geometry = desired_space::CircularSpec{};
      config.teacher.type = envs::FeedbackType::kAccurateAbsolute;
    } else if (!config.space.is_polytope()) {
      config.space.geometry = desired_space::PolytopeSpec{};
    }
    session_.reset_learner(config);
  } else {
    return {{error_frame("unknown control command '" + cmd + "'")}, {}};
  }
  return {{ack}, {}};
}

TeachSession::Reply TeachSession::handle_landscape(const json& msg) {
  const auto* energy = session_.learner().energy();
  if (!energy) return {{error_frame("the current method has no energy landscape")}, {}};
  if (energy->action_dim() != 2) return {{error_frame("landscape needs a 2D action space")}, {}};
  trainer::LandscapeGrid grid;
  grid.resolution = msg.value("resolution", 41);
  if (grid.resolution < 2 || grid.resolution > 201) {
    return {{error_frame("resolution must be in [2, 201]")}, {}};
  }
  Eigen::VectorXd state = session_.env().state();
  if (state.size() == 0) return {{error_frame("no episode running")}, {}};
  const Eigen::VectorXd e = trainer::grid_energies(*energy, state, grid);
  return {{json{{"type", "landscape"},
                {"episode", session_.episode()},
                {"step", session_.env().steps()},
                {"lo", grid.lo},
                {"hi", grid.hi},
                {"resolution", grid.resolution},
                {"energy", vec(e)}}},
          {}};
}

}  // namespace clic::serve
