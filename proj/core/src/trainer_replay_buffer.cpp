#include "clic/trainer/replay_buffer.hpp"

#include <numeric>

#include "clic/error.hpp"

namespace clic::trainer {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("ReplayBuffer: capacity must be >= 1");
}

void ReplayBuffer::append(ObservedCorrection correction) {
  correction.validate();
  if (records_.size() == capacity_) records_.pop_front();
  records_.push_back(std::move(correction));
}

std::vector<const ObservedCorrection*> ReplayBuffer::sample(std::size_t batch,
                                                            std::mt19937_64& rng) const {
  const std::size_t n = records_.size();
  const std::size_t k = std::min(batch, n);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates: the first k slots are a uniform draw without replacement.
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  std::vector<const ObservedCorrection*> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(&records_[idx[i]]);
  return out;
}

}  // namespace clic::trainer
