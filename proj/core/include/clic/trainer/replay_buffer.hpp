#pragma once

#include <cstddef>
#include <deque>
#include <limits>
#include <random>
#include <vector>

#include "clic/desired_space/correction.hpp"

namespace clic::trainer {

using desired_space::ObservedCorrection;

// Store of observed corrections. Unbounded by default; with a finite capacity
// the oldest record is evicted first.
class ReplayBuffer {
 public:
  static constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

  explicit ReplayBuffer(std::size_t capacity = kUnbounded);

  // Validates the record before storing it.
  void append(ObservedCorrection correction);

  // Uniform sample without replacement; min(batch, size()) records.
  std::vector<const ObservedCorrection*> sample(std::size_t batch,
                                                std::mt19937_64& rng) const;

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  std::size_t capacity() const { return capacity_; }
  const ObservedCorrection& operator[](std::size_t i) const { return records_[i]; }
  void clear() { records_.clear(); }

 private:
  std::size_t capacity_;
  std::deque<ObservedCorrection> records_;
};

}  // namespace clic::trainer
