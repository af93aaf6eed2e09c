#pragma once

#include <stdexcept>
#include <string>

namespace clic {

// Shapes, dimensions or option combinations that can never work.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A caller broke an operation's precondition (empty input, bad range).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// NaN/Inf appeared where finite values are required.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Broken internal contract, e.g. a forward cache reused with other params.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace clic
