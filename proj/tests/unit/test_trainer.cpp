#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "clic/error.hpp"
#include "clic/desired_space/volume.hpp"
#include "clic/envs/teacher.hpp"
#include "clic/envs/toy.hpp"
#include "clic/losses/implicit.hpp"
#include "clic/losses/targets.hpp"
#include "clic/trainer/checkpoint.hpp"
#include "clic/trainer/config.hpp"
#include "clic/trainer/landscape.hpp"
#include "clic/trainer/learner.hpp"
#include "clic/trainer/metrics.hpp"
#include "clic/trainer/replay_buffer.hpp"
#include "clic/trainer/run.hpp"
#include "clic/trainer/toy.hpp"
#include "unit/surfaces.hpp"

using namespace clic;
using namespace clic::trainer;
using desired_space::CorrectionKind;
using envs::EnvKind;

namespace {

Vector v2(double x, double y) { return (Vector(2) << x, y).finished(); }

ObservedCorrection correction(const Vector& s, const Vector& ar, const Vector& ah) {
  ObservedCorrection c;
  c.state = s;
  c.robot_action = ar;
  c.human_action = ah;
  return c;
}

// Small and fast; every method shares it.
ExperimentConfig tiny(Method m, EnvKind env = EnvKind::kPointReach2D) {
  ExperimentConfig c;
  c.method = m;
  c.env = env;
  c.hidden = {16, 16};
  c.human_hidden = {8};
  c.sampler.n_samples = 8;
  c.sampler.train_steps = 3;
  c.sampler.infer_samples = 8;
  c.sampler.infer_steps = 3;
  c.batch_size = 4;
  c.n_training = 3;
  c.episodes = 3;
  c.eval_every = 1;
  c.eval_rollouts = 2;
  c.space.geometry = desired_space::PolytopeSpec{30.0, 0.3, 4};
  if (m == Method::kClicCircular) c.space.geometry = desired_space::CircularSpec{0.5};
  return c;
}

constexpr Method kAllMethods[] = {Method::kClicHalf, Method::kClicCircular, Method::kClicExplicit,
                                  Method::kIbc,      Method::kPvp,          Method::kHgDagger,
                                  Method::kDCoach,   Method::kBdCoach};

std::vector<ObservedCorrection> some_corrections(int n, std::uint64_t seed,
                                                 EnvKind env = EnvKind::kPointReach2D) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<ObservedCorrection> out;
  while (static_cast<int>(out.size()) < n) {
    const Vector s = envs::env_reset(env, rng);
    const Vector ar = v2(u(rng), u(rng));
    const Vector ah = envs::teacher_optimal_action(env, s, &ar);
    if ((ah - ar).norm() < 0.05) continue;
    out.push_back(correction(s, ar, ah));
  }
  return out;
}

Batch as_batch(const std::vector<ObservedCorrection>& data) {
  Batch b;
  for (const auto& c : data) b.push_back(&c);
  return b;
}

// Acts like the scripted expert, or always zero.
class FixedLearner final : public Learner {
 public:
  FixedLearner(EnvKind env, bool expert) : Learner(make_config(env)), expert_(expert) {}

  Matrix act(const Matrix& states, std::mt19937_64&) const override {
    const int ad = envs::env_dims(config_.env).action_dim;
    Matrix out = Matrix::Zero(states.rows(), ad);
    if (!expert_) return out;
    for (Eigen::Index r = 0; r < states.rows(); ++r) {
      out.row(r) = envs::teacher_optimal_action(config_.env, states.row(r).transpose()).transpose();
    }
    return out;
  }
  losses::LossReport update(const Batch&, std::span<const DesiredSpace>, std::mt19937_64&) override {
    return {};
  }
  std::vector<NamedNetwork> networks() const override { return {}; }
  void restore(const std::vector<NamedNetwork>&) override {}

 private:
  static ExperimentConfig make_config(EnvKind env) {
    ExperimentConfig c;
    c.method = Method::kHgDagger;
    c.env = env;
    return c;
  }
  bool expert_;
};

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("clic_test_" + name)).string();
}

}  // namespace

// ---- config ----

TEST(Config, MethodNames) {
  for (Method m : kAllMethods) EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_TRUE(is_implicit(Method::kIbc));
  EXPECT_FALSE(is_implicit(Method::kBdCoach));
  EXPECT_THROW(parse_method("sgd"), ConfigError);
}

TEST(Config, CompatibilityMatrix) {
  auto c = tiny(Method::kClicCircular);
  c.teacher.type = envs::FeedbackType::kAccurateRelative;
  EXPECT_THROW(c.validate(), ConfigError);
  c.teacher.type = envs::FeedbackType::kGaussianNoise;
  EXPECT_NO_THROW(c.validate());
  c.space.geometry = desired_space::PolytopeSpec{};
  EXPECT_THROW(c.validate(), ConfigError);

  auto h = tiny(Method::kClicHalf);
  for (auto t : {envs::FeedbackType::kAccurateAbsolute, envs::FeedbackType::kPartial,
                 envs::FeedbackType::kAccurateRelative, envs::FeedbackType::kDirectionNoise}) {
    h.teacher.type = t;
    EXPECT_NO_THROW(h.validate());
  }
  h.space.geometry = desired_space::CircularSpec{};
  EXPECT_THROW(h.validate(), ConfigError);

  auto e = tiny(Method::kClicExplicit);
  e.teacher.type = envs::FeedbackType::kAccurateRelative;
  EXPECT_NO_THROW(e.validate());
  e.teacher.type = envs::FeedbackType::kPartial;
  EXPECT_THROW(e.validate(), ConfigError);

  std::mt19937_64 rng(1);
  EXPECT_THROW(make_learner(c, rng), ConfigError);
}

TEST(Config, RangeChecks) {
  auto c = tiny(Method::kClicHalf);
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = tiny(Method::kClicHalf);
  c.stop_at_success = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = tiny(Method::kClicHalf);
  c.adam.learning_rate = -1.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  for (Method m : kAllMethods) {
    auto c = tiny(m);
    c.seed = 77;
    c.stop_at_success = 0.9;
    c.teacher.beta_deg = 30.0;
    const auto j = to_json(c);
    const auto back = config_from_json(j);
    EXPECT_EQ(to_json(back), j);
    EXPECT_EQ(config_hash(back), config_hash(c));
  }
}

TEST(Config, PartialJsonOverridesDefaults) {
  const auto c = config_from_json(nlohmann::json::parse(
      R"({"method":"ibc","sampler":{"n_samples":16},"space":{"geometry":"polytope","alpha_deg":45}})"));
  EXPECT_EQ(c.method, Method::kIbc);
  EXPECT_EQ(c.sampler.n_samples, 16);
  EXPECT_EQ(c.sampler.train_steps, SamplerConfig{}.train_steps);
  EXPECT_EQ(std::get<desired_space::PolytopeSpec>(c.space.geometry).alpha_deg, 45.0);
  EXPECT_EQ(c.batch_size, 32);
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"lr":1})")), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"sampler":{"steps":1}})")), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"batch_size":"big"})")), ConfigError);
}

TEST(Config, HashSensitive) {
  auto a = tiny(Method::kClicHalf);
  auto b = a;
  b.seed = 1;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a), config_hash(tiny(Method::kClicHalf)));
}

TEST(Config, LoadFromFile) {
  const auto path = temp_path("config.json");
  {
    std::ofstream f(path);
    f << R"({"method":"clic_explicit","episodes":12})";
  }
  const auto c = load_config(path);
  EXPECT_EQ(c.method, Method::kClicExplicit);
  EXPECT_EQ(c.episodes, 12);
  std::filesystem::remove(path);
  EXPECT_THROW(load_config(path), ConfigError);
}

TEST(Config, SamplerInferenceIsGreedy) {
  SamplerConfig s;
  EXPECT_TRUE(s.training(1).noise_on_final_step);
  EXPECT_FALSE(s.inference(1).noise_on_final_step);
  EXPECT_EQ(s.inference(1).n_steps, 50);
  EXPECT_EQ(s.training(1).n_steps, 25);
}

// ---- replay buffer ----

TEST(ReplayBuffer, SamplesWithoutReplacement) {
  ReplayBuffer buf;
  for (const auto& c : some_corrections(10, 2)) buf.append(c);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const auto batch = buf.sample(6, rng);
    EXPECT_EQ(batch.size(), 6u);
    EXPECT_EQ(std::set<const ObservedCorrection*>(batch.begin(), batch.end()).size(), 6u);
  }
  EXPECT_EQ(buf.sample(32, rng).size(), 10u);
  ReplayBuffer empty;
  EXPECT_TRUE(empty.sample(4, rng).empty());
}

TEST(ReplayBuffer, UniformCoverage) {
  ReplayBuffer buf;
  for (const auto& c : some_corrections(8, 4)) buf.append(c);
  std::mt19937_64 rng(5);
  std::map<const ObservedCorrection*, int> hits;
  for (int i = 0; i < 4000; ++i) {
    for (const auto* p : buf.sample(2, rng)) ++hits[p];
  }
  for (const auto& [p, n] : hits) EXPECT_NEAR(n, 1000, 120);
}

TEST(ReplayBuffer, RingEvictsOldest) {
  ReplayBuffer buf(3);
  const auto data = some_corrections(5, 6);
  for (const auto& c : data) buf.append(c);
  EXPECT_EQ(buf.size(), 3u);
  EXPECT_EQ(buf[0].robot_action, data[2].robot_action);
}

TEST(ReplayBuffer, RejectsInvalid) {
  ReplayBuffer buf;
  EXPECT_THROW(buf.append(correction(Vector::Zero(4), v2(0, 0), v2(0, 0))), UsageError);
  EXPECT_TRUE(buf.empty());
}

// ---- metrics ----

TEST(Metrics, ConvergenceExample) {
  MetricsLog log;
  log.add_eval({1000, 1, 0.1});
  log.add_eval({2000, 2, 0.5});
  log.add_eval({3000, 3, 0.95});
  log.add_eval({4000, 4, 1.0});
  EXPECT_EQ(convergence_timestep(log, 1), 3000);
  EXPECT_EQ(convergence_timestep(log), 3000);
}

TEST(Metrics, ConvergenceEdgeCases) {
  MetricsLog flat;
  for (int i = 1; i <= 4; ++i) flat.add_eval({i * 100, i, 0.4});
  EXPECT_EQ(convergence_timestep(flat), 100);
  MetricsLog zero;
  for (int i = 1; i <= 3; ++i) zero.add_eval({i * 100, i, 0.0});
  EXPECT_FALSE(convergence_timestep(zero).has_value());
  MetricsLog one;
  one.add_eval({100, 1, 1.0});
  EXPECT_THROW(convergence_timestep(one), UsageError);
}

TEST(Metrics, RecomputedOnPrefix) {
  MetricsLog log;
  const double rates[] = {0.2, 0.9, 0.1, 0.1, 0.1};
  for (int i = 0; i < 5; ++i) log.add_eval({(i + 1) * 10, i + 1, rates[i]});
  MetricsLog prefix;
  prefix.evals.assign(log.evals.begin(), log.evals.begin() + 2);
  // Prefix final 0.55 needs the 0.9; full final 0.1 is met by the first eval.
  EXPECT_EQ(convergence_timestep(prefix), 20);
  EXPECT_EQ(convergence_timestep(log), 10);
}

TEST(Metrics, TimestepsStrictlyIncrease) {
  MetricsLog log;
  log.add_eval({10, 1, 0.5});
  EXPECT_THROW(log.add_eval({10, 2, 0.5}), UsageError);
  EXPECT_EQ(log.evals.size(), 1u);
}

TEST(Metrics, CsvAndSummary) {
  MetricsLog log;
  log.add_eval({50, 1, 0.25});
  log.add_eval({100, 2, 0.5});
  log.feedback_per_episode = {3, 4};
  std::ostringstream out;
  write_metrics_csv(out, log);
  EXPECT_EQ(out.str().substr(0, 21), "timestep,success_rate");
  const std::string csv = out.str();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  const auto j = metrics_summary(log);
  EXPECT_EQ(j["feedback_total"], 7);
  EXPECT_DOUBLE_EQ(j["final_success_rate"].get<double>(), 0.375);
  // 0.9 * 0.375 = 0.3375 is first reached at the second evaluation.
  EXPECT_EQ(j["convergence_timestep"], 100);
}

// ---- landscape and toy metrics ----

TEST(Landscape, GridShapeAndOrder) {
  LandscapeGrid g;
  g.resolution = 5;
  const Matrix a = grid_actions(g, 2);
  ASSERT_EQ(a.rows(), 25);
  EXPECT_EQ(Vector(a.row(0).transpose()), v2(-1, -1));
  EXPECT_EQ(Vector(a.row(1).transpose()), v2(-1, -0.5));
  EXPECT_EQ(Vector(a.row(5).transpose()), v2(-0.5, -1));
  g.dim_y = 3;
  EXPECT_THROW(g.validate(2), ConfigError);
}

TEST(Landscape, DumpFormat) {
  LandscapeGrid g;
  g.resolution = 7;
  std::ostringstream out;
  dump_landscape(out, testkit::QuadraticSurface(Vector::Zero(2)), Vector::Zero(1), g);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# lo=", 0), 0u);
  std::getline(in, line);
  EXPECT_EQ(line, "a1,a2,energy");
  int rows = 0;
  double best = 1e9, bx = 0, by = 0;
  while (std::getline(in, line)) {
    ++rows;
    double x, y, e;
    char c1, c2;
    std::istringstream(line) >> x >> c1 >> y >> c2 >> e;
    if (e < best) best = e, bx = x, by = y;
  }
  EXPECT_EQ(rows, 49);
  EXPECT_NEAR(bx, 0.0, 1e-12);
  EXPECT_NEAR(by, 0.0, 1e-12);
}

TEST(Landscape, ConstantEnergyConstantGrid) {
  LandscapeGrid g;
  g.resolution = 11;
  const Vector e = grid_energies(testkit::QuadraticSurface(Vector::Zero(2), 1, true), Vector::Zero(1), g);
  EXPECT_EQ(e.maxCoeff(), e.minCoeff());
}

TEST(ToyMetrics, GridMinima) {
  LandscapeGrid g;
  g.resolution = 21;
  const auto minima = find_grid_minima(
      grid_energies(testkit::QuadraticSurface(v2(0.3, -0.4)), Vector::Zero(1), g), g);
  ASSERT_EQ(minima.size(), 1u);
  EXPECT_TRUE(minima[0].action.isApprox(v2(0.3, -0.4)));
  EXPECT_FALSE(minima[0].boundary);
  const auto edge = find_grid_minima(
      grid_energies(testkit::QuadraticSurface(v2(3.0, 0.0)), Vector::Zero(1), g), g);
  ASSERT_EQ(edge.size(), 1u);
  EXPECT_TRUE(edge[0].boundary);
}

TEST(ToyMetrics, Examples) {
  LandscapeGrid g;
  g.resolution = 21;
  const Vector centre = grid_energies(testkit::QuadraticSurface(Vector::Zero(2)), Vector::Zero(1), g);
  std::vector<Vector> grids{centre, centre, centre};
  std::vector<std::vector<ObservedCorrection>> data(
      3, std::vector<ObservedCorrection>{correction(Vector::Zero(1), v2(0.5, 0.5), v2(0.3, 0.2))});
  const auto m = toy_metrics(grids, data, g, Vector::Zero(2));
  EXPECT_NEAR(m.mse_to_optimal, 0.0, 1e-20);
  EXPECT_NEAR(m.cross_trial_variance, 0.0, 1e-15);
  EXPECT_NEAR(m.mse_to_human, 0.13, 1e-12);

  // Minimum sitting on the only a^h.
  std::vector<Vector> at_h{grid_energies(testkit::QuadraticSurface(v2(0.3, 0.2)), Vector::Zero(1), g)};
  const auto h = toy_metrics(at_h, std::span(data).first(1), g, Vector::Zero(2));
  EXPECT_NEAR(h.mse_to_human, 0.0, 1e-20);
  EXPECT_NEAR(h.mse_to_optimal, 0.13, 1e-12);

  std::vector<Vector> differ{centre, at_h[0]};
  EXPECT_GT(toy_metrics(differ, std::span(data).first(2), g, Vector::Zero(2)).cross_trial_variance, 0.0);
}

// ---- learners ----

TEST(Learner, EveryMethodUpdates) {
  const auto data = some_corrections(6, 7);
  const Batch batch = as_batch(data);
  for (Method m : kAllMethods) {
    std::mt19937_64 rng(8);
    auto learner = make_learner(tiny(m), rng);
    const auto before = make_checkpoint(*learner);
    const auto rep = policy_shaping_step(*learner, batch, rng);
    EXPECT_TRUE(std::isfinite(rep.value)) << to_string(m);
    const auto after = make_checkpoint(*learner);
    EXPECT_NE(checkpoint_to_json(before)["networks"], checkpoint_to_json(after)["networks"])
        << to_string(m);
    const Matrix acts = learner->act(Matrix(Matrix::Random(3, 4)), rng);
    EXPECT_EQ(acts.rows(), 3);
    EXPECT_LE(acts.cwiseAbs().maxCoeff(), 1.0);
  }
}

TEST(Learner, SpacesMustMatchBatch) {
  const auto data = some_corrections(3, 9);
  std::mt19937_64 rng(10);
  auto learner = make_learner(tiny(Method::kClicHalf), rng);
  EXPECT_TRUE(learner->needs_spaces());
  EXPECT_THROW(learner->update(as_batch(data), {}, rng), UsageError);
  auto bc = make_learner(tiny(Method::kHgDagger), rng);
  EXPECT_FALSE(bc->needs_spaces());
}

// With eps = 1 the ball collapses onto a^h; as T -> 0 the uniform target is
// one-hot on a^h and the KL loss is the InfoNCE loss over the same samples.
TEST(Learner, CircularLimitReducesToInfoNce) {
  std::mt19937_64 rng(11);
  const auto model = policy::EnergyModel::create(4, 2, {16, 16}, rng);
  const Vector s = Vector::Random(4), ar = v2(0.6, -0.2), ah = v2(-0.1, 0.3);
  const auto samples = policy::langevin_sample(model, s, tiny(Method::kIbc).sampler.training(1), rng);
  const auto set = policy::ActionSampleSet::assemble(s, ah, ar, samples.actions);
  const auto space = DesiredSpace::build(correction(s, ar, ah),
                                         {desired_space::CircularSpec{1.0}, 1e-6}, rng);
  const Vector target = losses::target_uniform(space.probabilities(set.actions));
  const auto kl = losses::kl_loss(model, set, target);
  const auto nce = losses::infonce_loss(model, s, ah, set.actions.bottomRows(set.size() - 1));
  EXPECT_NEAR(kl.value, nce.value, 1e-6);
}

TEST(Learner, NonFiniteUpdateLeavesParams) {
  std::mt19937_64 rng(12);
  auto cfg = tiny(Method::kHgDagger);
  auto learner = make_learner(cfg, rng);
  auto nets = learner->networks();
  nets[0].params.layers[0].weight(0, 0) = std::numeric_limits<double>::quiet_NaN();
  learner->restore(nets);
  const auto data = some_corrections(2, 13);
  EXPECT_THROW(policy_shaping_step(*learner, as_batch(data), rng), std::exception);
}

// Policy mass inside the common desired region never drops by more than MC
// noise while CLIC trains on ToyConstant2D corrections.
TEST(Learner, ToyMassInsideDesiredRegionGrows) {
  for (Method m : {Method::kClicHalf, Method::kClicCircular}) {
    auto cfg = tiny(m, EnvKind::kToyConstant2D);
    cfg.hidden = {32, 32};
    cfg.sampler.n_samples = 32;
    cfg.sampler.train_steps = 10;
    cfg.batch_size = 8;
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<ObservedCorrection> data;
    while (data.size() < 8) {
      const Vector ar = v2(u(rng), u(rng));
      if (ar.norm() > 0.3) data.push_back(correction(Vector::Zero(1), ar, Vector::Zero(2)));
    }
    auto learner = make_learner(cfg, rng);
    const auto spaces = build_spaces(cfg, as_batch(data), rng);
    std::mt19937_64 probe_rng(15);
    Matrix probes(2048, 2);
    for (Eigen::Index i = 0; i < probes.size(); ++i) probes.data()[i] = u(probe_rng);
    std::vector<bool> inside(2048, true);
    for (const auto& sp : spaces) {
      const auto in = sp.contains_rows(probes);
      for (int i = 0; i < 2048; ++i) inside[i] = inside[i] && in[i];
    }
    auto mass = [&] {
      const Vector e = learner->energy()->energies(Vector::Zero(1), probes);
      const Vector p = policy::estimate_policy_probs(e);
      double in = 0.0;
      for (int i = 0; i < 2048; ++i) in += inside[i] ? p(i) : 0.0;
      return in;
    };
    std::vector<double> masses{mass()};
    ReplayBuffer buf;
    for (const auto& c : data) buf.append(c);
    for (int episode = 0; episode < 6; ++episode) {
      for (int k = 0; k < 25; ++k) policy_shaping_step(*learner, buf.sample(8, rng), rng);
      masses.push_back(mass());
    }
    for (std::size_t i = 1; i < masses.size(); ++i) {
      EXPECT_GE(masses[i], masses[i - 1] - 0.05) << to_string(m) << " step " << i;
    }
    EXPECT_GT(masses.back(), masses.front()) << to_string(m);
  }
}

// ---- checkpoints ----

TEST(Checkpoint, RoundTripEveryMethod) {
  for (Method m : kAllMethods) {
    std::mt19937_64 rng(16);
    const auto cfg = tiny(m);
    auto learner = make_learner(cfg, rng);
    const auto path = temp_path(std::string(to_string(m)) + ".ckpt.json");
    save_checkpoint(path, make_checkpoint(*learner));
    const auto loaded = load_checkpoint(path);
    EXPECT_EQ(loaded.config_hash, config_hash(cfg));
    auto restored = learner_from_checkpoint(loaded);
    const auto a = learner->networks(), b = restored->networks();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].name, b[i].name);
      EXPECT_EQ(a[i].spec, b[i].spec);
      EXPECT_EQ(a[i].params.flatten(), b[i].params.flatten());
    }
    std::filesystem::remove(path);
  }
}

TEST(Checkpoint, CorruptedFileRefused) {
  std::mt19937_64 rng(17);
  auto learner = make_learner(tiny(Method::kClicHalf), rng);
  const auto path = temp_path("corrupt.ckpt.json");
  save_checkpoint(path, make_checkpoint(*learner));
  std::string text;
  {
    std::ifstream f(path);
    text.assign(std::istreambuf_iterator<char>(f), {});
  }
  {
    std::ofstream f(path, std::ios::trunc);
    f << text.substr(0, text.size() / 2);
  }
  EXPECT_THROW(load_checkpoint(path), CheckpointError);
  std::filesystem::remove(path);
  EXPECT_THROW(load_checkpoint(path), CheckpointError);
}

TEST(Checkpoint, MismatchesRefused) {
  std::mt19937_64 rng(18);
  auto learner = make_learner(tiny(Method::kClicHalf), rng);
  const auto j = checkpoint_to_json(make_checkpoint(*learner));

  auto version = j;
  version["version"] = 99;
  EXPECT_THROW(checkpoint_from_json(version), CheckpointError);

  auto shape = j;
  shape["networks"][0]["layers"][0]["bias"].erase(0);
  EXPECT_THROW(checkpoint_from_json(shape), CheckpointError);

  // A different spec than the config describes.
  auto ckpt = checkpoint_from_json(j);
  ckpt.networks[0].spec.widths[1] = 7;
  ckpt.networks[0].params = numkit::MlpParams::zeros(ckpt.networks[0].spec);
  EXPECT_THROW(learner_from_checkpoint(ckpt), CheckpointError);

  auto hash = checkpoint_from_json(j);
  hash.config_hash ^= 1;
  EXPECT_THROW(learner_from_checkpoint(hash), CheckpointError);
}

// ---- loop ----

TEST(Evaluate, ScriptedAndZeroPolicies) {
  std::mt19937_64 r1(19), r2(19);
  EXPECT_EQ(evaluate(FixedLearner(EnvKind::kPointReach2D, true), EnvKind::kPointReach2D, 20, r1), 1.0);
  EXPECT_EQ(evaluate(FixedLearner(EnvKind::kPointReach2D, false), EnvKind::kPointReach2D, 20, r2), 0.0);
  std::mt19937_64 r3(20);
  EXPECT_EQ(evaluate(FixedLearner(EnvKind::kToyConstant2D, true), EnvKind::kToyConstant2D, 5, r3), 1.0);
}

TEST(Evaluate, Reproducible) {
  std::mt19937_64 rng(21);
  auto learner = make_learner(tiny(Method::kClicHalf), rng);
  std::mt19937_64 a(22), b(22);
  EXPECT_EQ(evaluate(*learner, EnvKind::kPointReach2D, 4, a),
            evaluate(*learner, EnvKind::kPointReach2D, 4, b));
}

TEST(Session, UpdateCadence) {
  auto cfg = tiny(Method::kClicExplicit);
  cfg.update_every = 5;
  IilSession session(cfg);
  session.begin_episode();
  const FeedbackFn none = [](const Vector&, const Vector&, int) {
    return std::optional<ObservedCorrection>{};
  };
  // Empty buffer: the t = 5 trigger is skipped.
  for (int t = 1; t <= 5; ++t) EXPECT_FALSE(session.step(none).updated);
  EXPECT_EQ(session.end_episode(), 0);

  session.begin_episode();
  const FeedbackFn at3 = [](const Vector& s, const Vector& ar, int t) -> std::optional<ObservedCorrection> {
    if (t != 3) return std::nullopt;
    Vector ah = -ar;
    if ((ah - ar).norm() < 1e-6) ah = v2(0.5, 0.5);
    return correction(s, ar, ah);
  };
  std::vector<int> updated;
  for (int t = 1; t <= 12 && !session.env().done(); ++t) {
    const auto info = session.step(at3);
    if (info.updated) updated.push_back(info.t);
  }
  EXPECT_EQ(updated, (std::vector<int>{3, 5, 10}));
  EXPECT_EQ(session.episode_feedback(), 1);
  EXPECT_EQ(session.end_episode(), cfg.n_training);
}

TEST(Session, IngestFeedbackUpdates) {
  IilSession session(tiny(Method::kClicHalf));
  session.begin_episode();
  EXPECT_FALSE(session.update_once());
  EXPECT_TRUE(session.ingest_feedback(correction(session.env().state(), v2(0, 0), v2(0.2, 0))));
  EXPECT_EQ(session.buffer().size(), 1u);
}

TEST(RunIil, Deterministic) {
  for (Method m : {Method::kClicHalf, Method::kClicExplicit, Method::kBdCoach}) {
    const auto cfg = tiny(m);
    const auto a = run_iil(cfg);
    const auto b = run_iil(cfg);
    ASSERT_EQ(a.evals.size(), b.evals.size());
    for (std::size_t i = 0; i < a.evals.size(); ++i) {
      EXPECT_EQ(a.evals[i].timestep, b.evals[i].timestep);
      EXPECT_EQ(a.evals[i].success_rate, b.evals[i].success_rate);
    }
    EXPECT_EQ(a.feedback_per_episode, b.feedback_per_episode);
    EXPECT_EQ(a.updates_per_episode, b.updates_per_episode);
    EXPECT_EQ(a.episodes_run, 3);
  }
}

TEST(RunIil, EvaluationSchedule) {
  auto cfg = tiny(Method::kHgDagger);
  cfg.episodes = 7;
  cfg.eval_every = 3;
  const auto log = run_iil(cfg);
  std::vector<int> episodes;
  for (const auto& e : log.evals) episodes.push_back(e.episode);
  EXPECT_EQ(episodes, (std::vector<int>{1, 3, 6, 7}));
}

TEST(RunIil, WritesFinalCheckpoint) {
  const auto path = temp_path("final.ckpt.json");
  RunOptions opts;
  opts.final_checkpoint = path;
  int evals = 0;
  opts.on_eval = [&](const EvalPoint&) { ++evals; };
  const auto log = run_iil(tiny(Method::kClicExplicit), opts);
  EXPECT_EQ(evals, static_cast<int>(log.evals.size()));
  EXPECT_NO_THROW(learner_from_checkpoint(load_checkpoint(path)));
  std::filesystem::remove(path);
}

TEST(RunIil, DivergenceAbortsWithDiagnostic) {
  auto cfg = tiny(Method::kPvp);
  cfg.adam.learning_rate = 1e300;
  const auto dir = temp_path("diverge");
  std::filesystem::create_directories(dir);
  RunOptions opts;
  opts.out_dir = dir;
  const auto log = run_iil(cfg, opts);
  if (log.aborted) {
    EXPECT_FALSE(log.abort_reason.empty());
    EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(dir) / "diverged.ckpt.json"));
  }
  std::filesystem::remove_all(dir);
}

TEST(Offline, TrainsOnFrozenBuffer) {
  auto cfg = tiny(Method::kClicHalf, EnvKind::kToyConstant2D);
  const auto data = envs::make_toy_dataset(23, 6);
  auto learner = train_offline(cfg, data, 5);
  ASSERT_NE(learner->energy(), nullptr);
  EXPECT_THROW(train_offline(cfg, {}, 5), UsageError);
}
