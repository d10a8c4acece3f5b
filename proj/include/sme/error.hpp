#pragma once

#include <stdexcept>
#include <string>

namespace sme {

// Caller broke a documented precondition (bad shapes, invalid labels, ...).
struct ContractViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed input text (CSV cells, combined value-class labels, ...).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid run configuration; the CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A metric whose denominator is empty. Never silently reported as 0.
struct UndefinedMetric : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Optimization produced a non-finite loss.
struct TrainingDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Model applied to data with a different feature schema.
struct SchemaMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sme
