#include "clic/trainer/config.hpp"

#include <array>
#include <fstream>
#include <set>

#include "clic/error.hpp"

namespace clic::trainer {
namespace {

using nlohmann::json;

constexpr std::array<std::pair<Method, std::string_view>, 8> kMethods{{
    {Method::kClicHalf, "clic_half"},
    {Method::kClicCircular, "clic_circular"},
    {Method::kClicExplicit, "clic_explicit"},
    {Method::kIbc, "ibc"},
    {Method::kPvp, "pvp"},
    {Method::kHgDagger, "hg_dagger"},
    {Method::kDCoach, "d_coach"},
    {Method::kBdCoach, "bd_coach"},
}};

// Strict object reader: every key must be consumed.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError("config: '" + name_ + "' must be an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("config: unknown key '" + name_ + "." + key + "'");
    }
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config: bad value for '" + name_ + "." + key + "'");
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

json space_json(const desired_space::DesiredSpaceSpec& s) {
  json j{{"temperature", s.temperature}};
  if (const auto* p = std::get_if<desired_space::PolytopeSpec>(&s.geometry)) {
    j["geometry"] = "polytope";
    j["alpha_deg"] = p->alpha_deg;
    j["epsilon"] = p->epsilon;
    j["n_implicit"] = p->n_implicit;
  } else {
    j["geometry"] = "circular";
    j["epsilon"] = std::get<desired_space::CircularSpec>(s.geometry).epsilon;
  }
  return j;
}

void read_space(const json& j, desired_space::DesiredSpaceSpec& s) {
  Section sec(j, "space");
  std::string geometry = s.is_polytope() ? "polytope" : "circular";
  sec.get("geometry", geometry);
  sec.get("temperature", s.temperature);
  if (geometry == "polytope") {
    desired_space::PolytopeSpec p;
    if (const auto* cur = std::get_if<desired_space::PolytopeSpec>(&s.geometry)) p = *cur;
    sec.get("alpha_deg", p.alpha_deg);
    sec.get("epsilon", p.epsilon);
    sec.get("n_implicit", p.n_implicit);
    s.geometry = p;
  } else if (geometry == "circular") {
    desired_space::CircularSpec c;
    if (const auto* cur = std::get_if<desired_space::CircularSpec>(&s.geometry)) c = *cur;
    sec.get("epsilon", c.epsilon);
    s.geometry = c;
  } else {
    throw ConfigError("config: space.geometry must be 'polytope' or 'circular'");
  }
}

}  // namespace

std::string_view to_string(Method method) {
  for (const auto& [m, name] : kMethods) {
    if (m == method) return name;
  }
  throw InternalError("unknown Method");
}

Method parse_method(std::string_view name) {
  for (const auto& [m, n] : kMethods) {
    if (n == name) return m;
  }
  throw ConfigError("unknown method: " + std::string(name));
}

bool is_implicit(Method method) {
  return method == Method::kClicHalf || method == Method::kClicCircular ||
         method == Method::kIbc || method == Method::kPvp;
}

policy::LangevinConfig SamplerConfig::training(std::uint64_t seed) const {
  policy::LangevinConfig c;
  c.n_samples = n_samples;
  c.n_steps = train_steps;
  c.step_init = step_init;
  c.step_min = step_min;
  c.decay_power = decay_power;
  c.noise_scale = noise_scale;
  c.noise_on_final_step = true;
  c.seed = seed;
  return c;
}

policy::LangevinConfig SamplerConfig::inference(std::uint64_t seed) const {
  policy::LangevinConfig c = training(seed);
  c.n_samples = infer_samples;
  c.n_steps = infer_steps;
  c.noise_on_final_step = false;
  return c;
}

void ExperimentConfig::validate() const {
  teacher.validate();
  space.validate();
  adam.validate();
  sampler.training(0).validate();
  sampler.inference(0).validate();
  auto positive = [](int v, const char* what) {
    if (v < 1) throw ConfigError(std::string("config: ") + what + " must be >= 1");
  };
  positive(update_every, "update_every");
  positive(batch_size, "batch_size");
  positive(episodes, "episodes");
  positive(eval_rollouts, "eval_rollouts");
  positive(dcoach_buffer, "dcoach_buffer");
  if (n_training < 0) throw ConfigError("config: n_training must be >= 0");
  if (eval_every < 0) throw ConfigError("config: eval_every must be >= 0");
  for (int w : hidden) positive(w, "hidden widths");
  for (int w : human_hidden) positive(w, "human_hidden widths");
  if (!(penalty.delta > 0.0) || penalty.margin < 0.0 || penalty.weight < 0.0) {
    throw ConfigError("config: penalty needs delta > 0, margin >= 0, weight >= 0");
  }
  if (stop_at_success && !(*stop_at_success > 0.0 && *stop_at_success <= 1.0)) {
    throw ConfigError("config: stop_at_success must be in (0, 1]");
  }

  const auto kind = envs::correction_kind(teacher.type);
  switch (method) {
    case Method::kClicHalf:
      if (!space.is_polytope()) throw ConfigError("config: clic_half needs a polytope space");
      break;
    case Method::kClicCircular:
      if (space.is_polytope()) throw ConfigError("config: clic_circular needs a circular space");
      if (kind != desired_space::CorrectionKind::kAbsolute) {
        throw ConfigError("config: clic_circular needs absolute feedback");
      }
      break;
    case Method::kClicExplicit:
      if (!space.is_polytope()) throw ConfigError("config: clic_explicit needs a polytope space");
      if (kind == desired_space::CorrectionKind::kPartial) {
        throw ConfigError("config: clic_explicit accepts absolute or relative feedback");
      }
      break;
    default:
      break;
  }
}

nlohmann::json to_json(const ExperimentConfig& c) {
  json j;
  j["method"] = to_string(c.method);
  j["env"] = envs::to_string(c.env);
  j["seed"] = c.seed;
  j["episodes"] = c.episodes;
  j["eval_every"] = c.eval_every;
  j["eval_rollouts"] = c.eval_rollouts;
  j["update_every"] = c.update_every;
  j["batch_size"] = c.batch_size;
  j["n_training"] = c.n_training;
  j["hidden"] = c.hidden;
  j["policy_weighted_target"] = c.policy_weighted_target;
  j["target_gradient"] = c.target_gradient;
  j["dcoach_buffer"] = c.dcoach_buffer;
  j["human_hidden"] = c.human_hidden;
  j["stop_at_success"] = c.stop_at_success ? json(*c.stop_at_success) : json(nullptr);
  j["adam"] = {{"learning_rate", c.adam.learning_rate},
               {"beta1", c.adam.beta1},
               {"beta2", c.adam.beta2},
               {"epsilon", c.adam.epsilon}};
  j["penalty"] = {{"delta", c.penalty.delta},
                  {"margin", c.penalty.margin},
                  {"weight", c.penalty.weight}};
  j["teacher"] = {{"type", envs::to_string(c.teacher.type)},
                  {"noise_lambda", c.teacher.noise_lambda},
                  {"lambda_is_variance", c.teacher.lambda_is_variance},
                  {"beta_deg", c.teacher.beta_deg},
                  {"magnitude", c.teacher.magnitude},
                  {"threshold", c.teacher.threshold},
                  {"cadence", c.teacher.cadence},
                  {"seed", c.teacher.seed}};
  j["space"] = space_json(c.space);
  j["sampler"] = {{"n_samples", c.sampler.n_samples},
                  {"train_steps", c.sampler.train_steps},
                  {"infer_samples", c.sampler.infer_samples},
                  {"infer_steps", c.sampler.infer_steps},
                  {"step_init", c.sampler.step_init},
                  {"step_min", c.sampler.step_min},
                  {"decay_power", c.sampler.decay_power},
                  {"noise_scale", c.sampler.noise_scale}};
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  Section top(j, "config");
  std::string method{to_string(c.method)}, env{envs::to_string(c.env)};
  top.get("method", method);
  top.get("env", env);
  c.method = parse_method(method);
  c.env = envs::parse_env_kind(env);
  top.get("seed", c.seed);
  top.get("episodes", c.episodes);
  top.get("eval_every", c.eval_every);
  top.get("eval_rollouts", c.eval_rollouts);
  top.get("update_every", c.update_every);
  top.get("batch_size", c.batch_size);
  top.get("n_training", c.n_training);
  top.get("hidden", c.hidden);
  top.get("policy_weighted_target", c.policy_weighted_target);
  top.get("target_gradient", c.target_gradient);
  top.get("dcoach_buffer", c.dcoach_buffer);
  top.get("human_hidden", c.human_hidden);
  if (const json* s = top.child("stop_at_success"); s && !s->is_null()) {
    if (!s->is_number()) throw ConfigError("config: stop_at_success must be a number or null");
    c.stop_at_success = s->get<double>();
  }
  if (const json* a = top.child("adam")) {
    Section sec(*a, "adam");
    sec.get("learning_rate", c.adam.learning_rate);
    sec.get("beta1", c.adam.beta1);
    sec.get("beta2", c.adam.beta2);
    sec.get("epsilon", c.adam.epsilon);
  }
  if (const json* p = top.child("penalty")) {
    Section sec(*p, "penalty");
    sec.get("delta", c.penalty.delta);
    sec.get("margin", c.penalty.margin);
    sec.get("weight", c.penalty.weight);
  }
  if (const json* t = top.child("teacher")) {
    Section sec(*t, "teacher");
    std::string type{envs::to_string(c.teacher.type)};
    sec.get("type", type);
    c.teacher.type = envs::parse_feedback_type(type);
    sec.get("noise_lambda", c.teacher.noise_lambda);
    sec.get("lambda_is_variance", c.teacher.lambda_is_variance);
    sec.get("beta_deg", c.teacher.beta_deg);
    sec.get("magnitude", c.teacher.magnitude);
    sec.get("threshold", c.teacher.threshold);
    sec.get("cadence", c.teacher.cadence);
    sec.get("seed", c.teacher.seed);
  }
  if (const json* s = top.child("space")) read_space(*s, c.space);
  if (const json* s = top.child("sampler")) {
    Section sec(*s, "sampler");
    sec.get("n_samples", c.sampler.n_samples);
    sec.get("train_steps", c.sampler.train_steps);
    sec.get("infer_samples", c.sampler.infer_samples);
    sec.get("infer_steps", c.sampler.infer_steps);
    sec.get("step_init", c.sampler.step_init);
    sec.get("step_min", c.sampler.step_min);
    sec.get("decay_power", c.sampler.decay_power);
    sec.get("noise_scale", c.sampler.noise_scale);
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return config_from_json(j);
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  const std::string text = to_json(config).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace clic::trainer
