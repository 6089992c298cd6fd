#pragma once

#include <stdexcept>
#include <string>

namespace rgg {

/// Malformed arguments: dimension mismatch, empty sets, out-of-range sizes.
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a formula.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Parameter set that violates a precondition of a stage.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A stage ran but could not produce its output (e.g. exhausted candidates).
struct StageFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Unsupported : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace rgg
