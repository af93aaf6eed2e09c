#include <random>

#include <benchmark/benchmark.h>

#include "clic/alloc_tuning.hpp"
#include "clic/envs/teacher.hpp"
#include "clic/policy/langevin.hpp"
#include "clic/trainer/learner.hpp"
#include "clic/trainer/replay_buffer.hpp"

using namespace clic;

namespace {

void BM_MlpForwardBackward(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  numkit::MlpSpec spec{{6, 64, 64, 64, 32, 1}, numkit::OutputHead::kIdentity};
  std::mt19937_64 rng(1);
  const auto params = numkit::MlpParams::glorot_uniform(spec, rng);
  const numkit::Matrix x = numkit::Matrix::Random(batch, 6);
  const numkit::Matrix g = numkit::Matrix::Ones(batch, 1);
  for (auto _ : state) {
    auto fwd = numkit::mlp_forward(spec, params, x);
    auto back = numkit::mlp_backward(spec, params, fwd.cache, g);
    benchmark::DoNotOptimize(back.input_grads.data());
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_MlpForwardBackward)->Arg(128)->Arg(4096);

void BM_LangevinInference(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto model = policy::EnergyModel::create(4, 2, {64, 64, 64, 32}, rng);
  policy::LangevinConfig cfg;
  cfg.n_samples = static_cast<int>(state.range(0));
  cfg.n_steps = 50;
  cfg.noise_on_final_step = false;
  const numkit::Vector s = numkit::Vector::Random(4);
  for (auto _ : state) benchmark::DoNotOptimize(policy::infer_action(model, s, cfg, rng));
}
BENCHMARK(BM_LangevinInference)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_PolicyShapingStep(benchmark::State& state) {
  trainer::ExperimentConfig config;
  config.method = static_cast<trainer::Method>(state.range(0));
  config.sampler.n_samples = 64;
  config.sampler.train_steps = 15;
  std::mt19937_64 rng(3);
  auto learner = trainer::make_learner(config, rng);
  trainer::ReplayBuffer buffer;
  envs::SimulatedTeacher teacher(config.env, config.teacher);
  while (buffer.size() < 64) {
    const auto s = envs::env_reset(config.env, rng);
    const numkit::Vector ar = ActionBox{}.uniform(rng);
    if (auto c = teacher.feedback(s, ar, 2)) buffer.append(*c);
  }
  for (auto _ : state) {
    trainer::policy_shaping_step(*learner, buffer.sample(config.batch_size, rng), rng);
  }
}
BENCHMARK(BM_PolicyShapingStep)
    ->Arg(static_cast<int>(trainer::Method::kClicHalf))
    ->Arg(static_cast<int>(trainer::Method::kIbc))
    ->Arg(static_cast<int>(trainer::Method::kClicExplicit))
    ->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  clic::keep_large_allocations_on_heap();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
