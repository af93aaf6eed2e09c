#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clic/trainer/learner.hpp"

namespace clic::trainer {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  std::string method;
  std::string env;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  nlohmann::json config;  // full experiment config
  std::vector<NamedNetwork> networks;
};

Checkpoint make_checkpoint(const Learner& learner);

nlohmann::json checkpoint_to_json(const Checkpoint& ckpt);
// Throws CheckpointError on any missing field, version mismatch, or shape
// inconsistency; never returns a partial checkpoint.
Checkpoint checkpoint_from_json(const nlohmann::json& j);

// Written to a temporary file first, then renamed into place.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

// Rebuilds the learner the checkpoint came from.
std::unique_ptr<Learner> learner_from_checkpoint(const Checkpoint& ckpt);

}  // namespace clic::trainer
