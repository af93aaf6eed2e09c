// clic: train, evaluate and inspect interactive imitation learners.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "clic/alloc_tuning.hpp"
#include "clic/envs/toy.hpp"
#include "clic/error.hpp"
#include "clic/trainer/checkpoint.hpp"
#include "clic/trainer/config.hpp"
#include "clic/trainer/landscape.hpp"
#include "clic/trainer/run.hpp"
#include "clic/trainer/toy.hpp"

#ifdef CLIC_HAVE_SERVER
#include "clic/serve/teach_server.hpp"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace clic;

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON experiment config");
  cmd->add_option("--set", args.overrides,
                  "Override a config key, e.g. --set sampler.n_samples=64 (repeatable)");
  cmd->add_option("--seed", args.seed, "Master seed");
  cmd->add_option("--out", args.out_dir, "Output directory");
}

// "a.b.c=value": value parsed as JSON, else taken as a string.
void apply_override(json& j, const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value: " + text);
  json value;
  try {
    value = json::parse(text.substr(eq + 1));
  } catch (const json::exception&) {
    value = text.substr(eq + 1);
  }
  json* node = &j;
  std::stringstream path(text.substr(0, eq));
  std::string key;
  std::vector<std::string> keys;
  while (std::getline(path, key, '.')) keys.push_back(key);
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) node = &(*node)[keys[i]];
  (*node)[keys.back()] = value;
}

trainer::ExperimentConfig resolve_config(const CommonArgs& args) {
  json j = json::object();
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) throw ConfigError("cannot open " + args.config_path);
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ConfigError(args.config_path + ": " + e.what());
    }
  }
  for (const auto& o : args.overrides) apply_override(j, o);
  if (args.seed) j["seed"] = *args.seed;
  auto config = trainer::config_from_json(j);
  config.validate();
  return config;
}

fs::path out_dir(const CommonArgs& args, const char* fallback) {
  fs::path dir = args.out_dir.empty() ? fs::path(fallback) : fs::path(args.out_dir);
  fs::create_directories(dir);
  return dir;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
}

Eigen::VectorXd parse_vector(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

int cmd_train(const CommonArgs& args) {
  const auto config = resolve_config(args);
  const fs::path dir = out_dir(args, "runs/latest");
  write_json(dir / "config.json", trainer::to_json(config));
  trainer::RunOptions options;
  options.out_dir = dir.string();
  options.on_eval = [](const trainer::EvalPoint& p) {
    std::cerr << "episode " << p.episode << " timestep " << p.timestep << " success "
              << p.success_rate << '\n';
  };
  options.final_checkpoint = (dir / "final.ckpt.json").string();
  const auto log = trainer::run_iil(config, options);
  {
    std::ofstream csv(dir / "metrics.csv");
    trainer::write_metrics_csv(csv, log);
  }
  json summary = trainer::metrics_summary(log);
  summary["method"] = trainer::to_string(config.method);
  summary["env"] = envs::to_string(config.env);
  summary["seed"] = config.seed;
  write_json(dir / "summary.json", summary);
  std::cout << summary.dump(2) << '\n';
  return log.aborted ? 3 : 0;
}

int cmd_eval(const std::string& checkpoint, int rollouts, std::uint64_t seed) {
  const auto ckpt = trainer::load_checkpoint(checkpoint);
  const auto learner = trainer::learner_from_checkpoint(ckpt);
  auto rng = trainer::derive_rng(seed, trainer::kEvalStream);
  const double rate = trainer::evaluate(*learner, learner->config().env, rollouts, rng);
  std::cout << json{{"success_rate", rate}, {"rollouts", rollouts}, {"method", ckpt.method},
                    {"env", ckpt.env}}
                   .dump(2)
            << '\n';
  return 0;
}

int cmd_toy(const CommonArgs& args, int trials, int steps, int points, double sigma,
            bool multi) {
  auto config = resolve_config(args);
  if (!envs::is_toy(config.env)) config.env = multi ? envs::EnvKind::kToyMulti2D
                                                    : envs::EnvKind::kToyConstant2D;
  const fs::path dir = out_dir(args, "runs/toy");
  trainer::LandscapeGrid grid;
  std::vector<Eigen::VectorXd> grids;
  std::vector<std::vector<desired_space::ObservedCorrection>> datasets;
  for (int k = 0; k < trials; ++k) {
    const std::uint64_t trial_seed = config.seed * 1000 + k;
    datasets.push_back(multi ? envs::make_toy_multi_dataset(trial_seed, points, sigma)
                             : envs::make_toy_dataset(trial_seed, points, sigma));
    auto trial_config = config;
    trial_config.seed = trial_seed;
    const auto learner = trainer::train_offline(trial_config, datasets.back(), steps);
    const Eigen::VectorXd state = Eigen::VectorXd::Zero(1);
    if (learner->energy()) {
      grids.push_back(trainer::grid_energies(*learner->energy(), state, grid));
      std::ofstream csv(dir / ("landscape_trial" + std::to_string(k) + ".csv"));
      trainer::dump_landscape(csv, *learner->energy(), state, grid);
    } else {
      std::mt19937_64 rng(trial_seed);
      const Eigen::VectorXd a = learner->act(state, rng);
      std::cout << "trial " << k << " action " << a.transpose() << '\n';
    }
  }
  if (grids.empty()) return 0;
  Eigen::VectorXd optimal = Eigen::VectorXd::Zero(2);
  const auto m = trainer::toy_metrics(grids, datasets, grid, optimal);
  const json out{{"method", trainer::to_string(config.method)},
                 {"trials", trials},
                 {"steps", steps},
                 {"mse_to_optimal", m.mse_to_optimal},
                 {"mse_to_human", m.mse_to_human},
                 {"cross_trial_variance", m.cross_trial_variance},
                 {"flagged_trials", m.flagged_trials}};
  write_json(dir / "toy_metrics.json", out);
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_landscape(const std::string& checkpoint, const std::string& state_text, int resolution,
                  const std::string& out_path) {
  const auto learner = trainer::learner_from_checkpoint(trainer::load_checkpoint(checkpoint));
  if (!learner->energy()) throw UsageError("dump-landscape needs an energy-model checkpoint");
  Eigen::VectorXd state;
  if (state_text.empty()) {
    auto rng = trainer::derive_rng(learner->config().seed, trainer::kEvalStream);
    state = envs::env_reset(learner->config().env, rng);
  } else {
    state = parse_vector(state_text);
  }
  trainer::LandscapeGrid grid;
  grid.resolution = resolution;
  if (out_path.empty() || out_path == "-") {
    trainer::dump_landscape(std::cout, *learner->energy(), state, grid);
  } else {
    std::ofstream out(out_path);
    trainer::dump_landscape(out, *learner->energy(), state, grid);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  clic::keep_large_allocations_on_heap();
  CLI::App app{"Interactive imitation learning from corrections"};
  app.require_subcommand(1);

  CommonArgs train_args, toy_args, serve_args;
  auto* train = app.add_subcommand("train", "Run the interactive loop with a simulated teacher");
  add_common(train, train_args);

  std::string eval_ckpt;
  int eval_rollouts = 10;
  std::uint64_t eval_seed = 0;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint with the teacher off");
  eval->add_option("checkpoint", eval_ckpt, "Checkpoint file")->required();
  eval->add_option("--rollouts", eval_rollouts, "Evaluation episodes");
  eval->add_option("--seed", eval_seed, "Seed for start states");

  int toy_trials = 10, toy_steps = 1000, toy_points = 7;
  double toy_sigma = 0.15;
  bool toy_multi = false;
  auto* toy = app.add_subcommand("toy", "Offline toy overfitting experiment");
  add_common(toy, toy_args);
  toy->add_option("--trials", toy_trials, "Independent trials");
  toy->add_option("--steps", toy_steps, "Offline updates per trial");
  toy->add_option("--points", toy_points, "Corrections per trial")->check(CLI::Range(1, 1000));
  toy->add_option("--sigma", toy_sigma, "Label noise around the optimum");
  toy->add_flag("--multi", toy_multi, "Two-mode variant");

  std::string land_ckpt, land_state, land_out;
  int land_res = 101;
  auto* land = app.add_subcommand("dump-landscape", "Write an energy grid as CSV");
  land->add_option("checkpoint", land_ckpt, "Energy-model checkpoint")->required();
  land->add_option("--state", land_state, "Comma-separated state (default: a reset state)");
  land->add_option("--resolution", land_res, "Grid points per axis");
  land->add_option("--out", land_out, "Output file (default stdout)");

  int port = 8765;
  std::string static_dir;
  double tick_hz = 10.0;
  auto* serve = app.add_subcommand("serve", "Run the WebSocket teaching service");
  add_common(serve, serve_args);
  serve->add_option("--port", port, "TCP port");
  serve->add_option("--static", static_dir, "Directory of console assets to serve over HTTP");
  serve->add_option("--tick-hz", tick_hz, "Environment tick rate");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*train) return cmd_train(train_args);
    if (*eval) return cmd_eval(eval_ckpt, eval_rollouts, eval_seed);
    if (*toy) return cmd_toy(toy_args, toy_trials, toy_steps, toy_points, toy_sigma, toy_multi);
    if (*land) return cmd_landscape(land_ckpt, land_state, land_res, land_out);
    if (*serve) {
#ifdef CLIC_HAVE_SERVER
      serve::ServerOptions opts;
      opts.port = static_cast<unsigned short>(port);
      opts.static_dir = static_dir;
      opts.tick_hz = tick_hz;
      serve::run_teach_server(resolve_config(serve_args), opts);
      return 0;
#else
      std::cerr << "clic was built without the teaching service\n";
      return 2;
#endif
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
