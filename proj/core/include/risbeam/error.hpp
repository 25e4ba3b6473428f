#pragma once

#include <stdexcept>
#include <string>

namespace risbeam {

// Invalid argument values for a numeric routine (non-positive distance, etc).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A configuration that violates a SystemConfig or PartitionPlan invariant.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The BCD precoder step was asked to move with a zero Lipschitz constant.
class DegenerateAuxiliaryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace risbeam
