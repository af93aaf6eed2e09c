#include "clic/trainer/checkpoint.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "clic/error.hpp"

namespace clic::trainer {
namespace {

using nlohmann::json;

std::string head_name(numkit::OutputHead head) {
  return head == numkit::OutputHead::kIdentity ? "identity" : "symmetric_sigmoid";
}

numkit::OutputHead parse_head(const std::string& name) {
  if (name == "identity") return numkit::OutputHead::kIdentity;
  if (name == "symmetric_sigmoid") return numkit::OutputHead::kSymmetricSigmoid;
  throw CheckpointError("checkpoint: unknown output head '" + name + "'");
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json network_json(const NamedNetwork& net) {
  json layers = json::array();
  for (const auto& layer : net.params.layers) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      std::vector<double> row(layer.weight.cols());
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) row[c] = layer.weight(r, c);
      rows.push_back(row);
    }
    layers.push_back({{"weight", rows},
                      {"bias", std::vector<double>(layer.bias.data(),
                                                   layer.bias.data() + layer.bias.size())}});
  }
  return {{"name", net.name},
          {"widths", net.spec.widths},
          {"head", head_name(net.spec.head)},
          {"layers", layers}};
}

NamedNetwork network_from_json(const json& j) {
  NamedNetwork net;
  net.name = j.at("name").get<std::string>();
  net.spec.widths = j.at("widths").get<std::vector<int>>();
  net.spec.head = parse_head(j.at("head").get<std::string>());
  try {
    net.spec.validate();
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("checkpoint: ") + e.what());
  }
  const json& layers = j.at("layers");
  if (!layers.is_array() || static_cast<int>(layers.size()) != net.spec.num_layers()) {
    throw CheckpointError("checkpoint: layer count does not match widths");
  }
  net.params = numkit::MlpParams::zeros(net.spec);
  for (int l = 0; l < net.spec.num_layers(); ++l) {
    auto& layer = net.params.layers[l];
    const json& rows = layers[l].at("weight");
    const auto bias = layers[l].at("bias").get<std::vector<double>>();
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != layer.weight.rows() ||
        static_cast<Eigen::Index>(bias.size()) != layer.bias.size()) {
      throw CheckpointError("checkpoint: layer " + std::to_string(l) + " has the wrong shape");
    }
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      const auto row = rows[r].get<std::vector<double>>();
      if (static_cast<Eigen::Index>(row.size()) != layer.weight.cols()) {
        throw CheckpointError("checkpoint: layer " + std::to_string(l) + " has the wrong shape");
      }
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = row[c];
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = bias[i];
  }
  if (!net.params.all_finite()) throw CheckpointError("checkpoint: non-finite parameters");
  return net;
}

}  // namespace

Checkpoint make_checkpoint(const Learner& learner) {
  Checkpoint c;
  c.method = std::string(to_string(learner.config().method));
  c.env = std::string(envs::to_string(learner.config().env));
  c.config_hash = config_hash(learner.config());
  c.seed = learner.config().seed;
  c.config = to_json(learner.config());
  c.networks = learner.networks();
  return c;
}

json checkpoint_to_json(const Checkpoint& ckpt) {
  json nets = json::array();
  for (const auto& n : ckpt.networks) nets.push_back(network_json(n));
  return {{"format", "clic-checkpoint"},
          {"version", kCheckpointVersion},
          {"method", ckpt.method},
          {"env", ckpt.env},
          {"config_hash", hex(ckpt.config_hash)},
          {"seed", ckpt.seed},
          {"config", ckpt.config},
          {"networks", nets}};
}

Checkpoint checkpoint_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "clic-checkpoint") {
      throw CheckpointError("checkpoint: not a clic checkpoint");
    }
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw CheckpointError("checkpoint: unsupported version " + std::to_string(version));
    }
    Checkpoint c;
    c.method = j.at("method").get<std::string>();
    c.env = j.at("env").get<std::string>();
    c.config_hash = std::stoull(j.at("config_hash").get<std::string>(), nullptr, 16);
    c.seed = j.at("seed").get<std::uint64_t>();
    c.config = j.at("config");
    for (const auto& n : j.at("networks")) c.networks.push_back(network_from_json(n));
    if (c.networks.empty()) throw CheckpointError("checkpoint: no networks");
    return c;
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("checkpoint: malformed document: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw CheckpointError("checkpoint: malformed config_hash");
  }
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw CheckpointError("checkpoint: cannot write " + tmp);
    out << checkpoint_to_json(ckpt).dump() << '\n';
    if (!out) throw CheckpointError("checkpoint: write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("checkpoint: cannot open " + path);
  std::stringstream text;
  text << in.rdbuf();
  json j;
  try {
    j = json::parse(text.str());
  } catch (const json::exception& e) {
    throw CheckpointError("checkpoint: " + path + " is not valid JSON: " + e.what());
  }
  return checkpoint_from_json(j);
}

std::unique_ptr<Learner> learner_from_checkpoint(const Checkpoint& ckpt) {
  ExperimentConfig config;
  try {
    config = config_from_json(ckpt.config);
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("checkpoint: bad embedded config: ") + e.what());
  }
  if (config_hash(config) != ckpt.config_hash) {
    throw CheckpointError("checkpoint: config hash does not match the embedded config");
  }
  std::mt19937_64 rng(config.seed);
  auto learner = make_learner(config, rng);
  learner->restore(ckpt.networks);
  return learner;
}

}  // namespace clic::trainer
