#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "clic/error.hpp"
#include "clic/policy/energy.hpp"
#include "clic/policy/gaussian.hpp"
#include "clic/policy/langevin.hpp"
#include "clic/policy/sample_set.hpp"
#include "unit/surfaces.hpp"

using namespace clic;
using namespace clic::policy;
using testkit::QuadraticSurface;

namespace {

LangevinConfig deterministic_config(int steps) {
  LangevinConfig cfg;
  cfg.n_samples = 64;
  cfg.n_steps = steps;
  cfg.step_init = 0.1;
  cfg.step_min = 0.0;
  cfg.decay_power = 0.0;  // constant lambda = 0.1
  cfg.noise_scale = 0.0;
  return cfg;
}

}  // namespace

TEST(Langevin, StepSchedule) {
  LangevinConfig cfg;
  EXPECT_DOUBLE_EQ(cfg.step_size(0), 0.1 + 1e-5);
  EXPECT_DOUBLE_EQ(cfg.step_size(25), 1e-5);
  EXPECT_NEAR(cfg.step_size(5), 0.1 * 0.64 + 1e-5, 1e-15);
}

TEST(Langevin, FlatEnergyKeepsInitialisation) {
  QuadraticSurface flat(Vector::Zero(2), 1, true);
  std::mt19937_64 r1(3), r2(3);
  const auto once = langevin_sample(flat, Vector::Zero(1), deterministic_config(1), r1);
  const auto many = langevin_sample(flat, Vector::Zero(1), deterministic_config(7), r2);
  EXPECT_EQ(once.actions, many.actions);
  EXPECT_GT(once.actions.col(0).maxCoeff() - once.actions.col(0).minCoeff(), 0.5);
}

TEST(Langevin, QuadraticOneStepShrinksByLambda) {
  // With lambda 0.1 and no noise a -> a - 0.1 a = 0.9 a, e.g. (1,0) -> (0.9,0).
  QuadraticSurface flat(Vector::Zero(2), 1, true);
  QuadraticSurface bowl(Vector::Zero(2));
  std::mt19937_64 r1(4), r2(4);
  const Matrix init = langevin_sample(flat, Vector::Zero(1), deterministic_config(1), r1).actions;
  const Matrix out = langevin_sample(bowl, Vector::Zero(1), deterministic_config(1), r2).actions;
  EXPECT_TRUE(out.isApprox(0.9 * init, 1e-14));
}

TEST(Langevin, NoisyChainsContract) {
  QuadraticSurface bowl(Vector::Zero(2));
  QuadraticSurface flat(Vector::Zero(2), 1, true);
  LangevinConfig cfg;
  cfg.n_samples = 512;
  cfg.n_steps = 25;
  std::mt19937_64 r1(5), r2(5);
  const Matrix init = langevin_sample(flat, Vector::Zero(1), deterministic_config(1), r1).actions;
  const Matrix out = langevin_sample(bowl, Vector::Zero(1), cfg, r2).actions;
  ASSERT_EQ(out.rows(), 512);
  EXPECT_LT(out.rowwise().norm().mean(), init.rowwise().norm().mean());
  EXPECT_LE(out.maxCoeff(), 1.0);
  EXPECT_GE(out.minCoeff(), -1.0);
}

TEST(Langevin, BatchGroupsByState) {
  QuadraticSurface bowl(Vector::Zero(2), 3);
  std::mt19937_64 rng(6);
  LangevinConfig cfg;
  cfg.n_samples = 10;
  cfg.n_steps = 3;
  const auto res = langevin_sample_batch(bowl, Matrix::Zero(4, 3), cfg, rng);
  EXPECT_EQ(res.actions.rows(), 40);
  EXPECT_EQ(res.restarts, 0);
}

TEST(Langevin, InvalidConfigAndShapes) {
  QuadraticSurface bowl(Vector::Zero(2));
  std::mt19937_64 rng(7);
  LangevinConfig cfg;
  cfg.n_steps = 0;
  EXPECT_THROW(langevin_sample(bowl, Vector::Zero(1), cfg, rng), ConfigError);
  cfg = {};
  cfg.step_init = 0.0;
  EXPECT_THROW(langevin_sample(bowl, Vector::Zero(1), cfg, rng), ConfigError);
  EXPECT_THROW(langevin_sample(bowl, Vector::Zero(3), LangevinConfig{}, rng), ConfigError);
}

// At unit temperature the chains relax toward exp(-E) = N(c, I), so inference
// is the best of a wide cloud: the nearest of 512 draws sits about 0.06 from c
// and lies beyond 0.15 with probability (1 - 0.15^2 / 2)^512, about 0.3%.
TEST(Langevin, InferFindsQuadraticMinimum) {
  const Vector c = (Vector(2) << 0.3, -0.6).finished();
  QuadraticSurface bowl(c);
  LangevinConfig cfg;
  cfg.n_samples = 512;
  cfg.n_steps = 50;
  cfg.noise_on_final_step = false;
  const Vector a = infer_action(bowl, Vector::Zero(1), cfg);
  EXPECT_LT((a - c).norm(), 0.15);
  EXPECT_EQ(a, infer_action(bowl, Vector::Zero(1), cfg));
}

// A sharp bowl (spread 0.1) is where 0.05 and 1e-3 are reachable.
TEST(Langevin, InferFindsSharpMinimum) {
  const Vector c = (Vector(2) << 0.3, -0.6).finished();
  QuadraticSurface bowl(c, 1, false, 100.0);
  LangevinConfig cfg;
  cfg.n_samples = 512;
  cfg.n_steps = 50;
  cfg.noise_on_final_step = false;
  EXPECT_LT((infer_action(bowl, Vector::Zero(1), cfg) - c).norm(), 0.05);
}

TEST(Langevin, InferEnergyCloseOnGrid) {
  LangevinConfig cfg;
  cfg.n_samples = 128;
  cfg.n_steps = 50;
  cfg.noise_on_final_step = false;
  for (double x = -0.8; x <= 0.8 + 1e-9; x += 0.4) {
    for (double y = -0.8; y <= 0.8 + 1e-9; y += 0.4) {
      const Vector c = (Vector(2) << x, y).finished();
      const Vector a = infer_action(QuadraticSurface(c, 1, false, 100.0), Vector::Zero(1), cfg);
      EXPECT_LT(0.5 * (a - c).squaredNorm(), 1e-3) << x << "," << y;
      // Same 1e-3 bound in the unit bowl's own energy units is out of reach
      // (best of 128 draws from N(c, I) has energy near 1/128); 0.05 is not.
      const Vector b = infer_action(QuadraticSurface(c), Vector::Zero(1), cfg);
      EXPECT_LT(0.5 * (b - c).squaredNorm(), 0.05) << x << "," << y;
    }
  }
}

TEST(Langevin, InferOnFlatEnergyStaysInBox) {
  QuadraticSurface flat(Vector::Zero(2), 1, true);
  const Vector a = infer_action(flat, Vector::Zero(1), LangevinConfig{});
  EXPECT_TRUE(a.allFinite());
  EXPECT_LE(a.cwiseAbs().maxCoeff(), 1.0);
}

TEST(Langevin, EnergyModelSamplesInBox) {
  std::mt19937_64 rng(8);
  const auto model = EnergyModel::create(4, 2, {16, 16}, rng);
  LangevinConfig cfg;
  cfg.n_samples = 32;
  const Matrix out = langevin_sample_batch(model, Matrix::Random(3, 4), cfg, rng).actions;
  EXPECT_LE(out.cwiseAbs().maxCoeff(), 1.0);
}

TEST(PolicyProbs, Examples) {
  const Vector eq = Vector::Constant(4, 2.0);
  EXPECT_TRUE(estimate_policy_probs(eq).isApprox(Vector::Constant(4, 0.25)));
  const Vector e = (Vector(2) << 0.0, std::log(3.0)).finished();
  const Vector p = estimate_policy_probs(e);
  EXPECT_NEAR(p(0), 0.75, 1e-12);
  EXPECT_NEAR(p(1), 0.25, 1e-12);
  const Vector shifted = estimate_policy_probs((e.array() + 123.0).matrix());
  EXPECT_NEAR((shifted - p).cwiseAbs().maxCoeff(), 0.0, 1e-12);
  EXPECT_THROW(estimate_policy_probs(Vector()), UsageError);
}

TEST(PolicyProbs, SumsToOneUnderExtremeEnergies) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 300.0);
  for (int trial = 0; trial < 50; ++trial) {
    Vector e(16);
    for (auto& v : e) v = n(rng);
    const Vector p = estimate_policy_probs(e);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    Eigen::Index lo, hi;
    e.minCoeff(&lo);
    p.maxCoeff(&hi);
    EXPECT_EQ(lo, hi);
  }
}

TEST(Gaussian, ZeroNetworkActsZero) {
  const auto spec = squashed_mlp_spec(4, 2, {8});
  GaussianPolicy pol(4, 2, spec, numkit::MlpParams::zeros(spec));
  EXPECT_TRUE(pol.act(Vector::Random(4)).isZero());
}

TEST(Gaussian, SaturatesWithinBounds) {
  const auto spec = squashed_mlp_spec(4, 2, {8});
  auto params = numkit::MlpParams::zeros(spec);
  params.layers.back().bias.setConstant(500.0);
  GaussianPolicy pol(4, 2, spec, params);
  const Vector a = pol.act(Vector::Random(4));
  EXPECT_LE(a.maxCoeff(), 1.0);
  EXPECT_GT(a.minCoeff(), 0.999);
}

TEST(Gaussian, Deterministic) {
  std::mt19937_64 rng(10);
  const auto pol = GaussianPolicy::create(4, 2, {16, 16}, rng);
  const Vector s = Vector::Random(4);
  EXPECT_EQ(pol.act(s), pol.act(s));
  const Matrix states = Matrix::Random(5, 4);
  const Matrix batch = pol.act_batch(states);
  EXPECT_EQ(Vector(batch.row(2).transpose()), pol.act(states.row(2).transpose()));
  EXPECT_THROW(pol.act(Vector::Zero(3)), ConfigError);
}

TEST(EnergyModel, ShapeChecks) {
  std::mt19937_64 rng(11);
  const auto model = EnergyModel::create(4, 2, {8}, rng);
  EXPECT_EQ(model.spec().widths, (std::vector<int>{6, 8, 1}));
  EXPECT_THROW(model.join(Matrix::Zero(2, 4), Matrix::Zero(3, 2)), ConfigError);
  numkit::MlpSpec bad{{6, 8, 2}, numkit::OutputHead::kIdentity};
  EXPECT_THROW(EnergyModel(4, 2, bad, numkit::MlpParams::zeros(bad)), ConfigError);
}

TEST(EnergyModel, ActionGradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(12);
  const auto model = EnergyModel::create(3, 2, {16, 16}, rng);
  const Matrix s = Matrix::Random(4, 3);
  const Matrix a = Matrix::Random(4, 2) * 0.8;
  const auto ev = model.evaluate(s, a, true);
  for (int k = 0; k < 2; ++k) {
    Matrix up = a, down = a;
    up.col(k).array() += 1e-5;
    down.col(k).array() -= 1e-5;
    const Vector fd = (model.evaluate(s, up, false).energies -
                       model.evaluate(s, down, false).energies) / 2e-5;
    EXPECT_LT((fd - ev.action_grads.col(k)).norm() /
                  std::max(fd.norm(), 1e-12), 1e-4);
  }
}

TEST(SampleSet, LayoutIsHumanRobotThenSamples) {
  const Vector s = Vector::Zero(1);
  const Vector ah = (Vector(2) << 0.1, 0.2).finished();
  const Vector ar = (Vector(2) << -0.1, 0.0).finished();
  const auto set = ActionSampleSet::assemble(s, ah, ar, Matrix::Ones(3, 2) * 0.5);
  EXPECT_EQ(set.size(), 5);
  EXPECT_EQ(Vector(set.actions.row(0).transpose()), ah);
  EXPECT_EQ(Vector(set.actions.row(1).transpose()), ar);
}
