#pragma once

#include <stdexcept>
#include <string>

namespace mps {

// Violated operation precondition (bad parameter, zero variance, ...).
// The CLI maps this to exit code 3.
class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed model / scenario file. Carries the offending field when known.
class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// Numeric failure during generation (e.g. covariance section not PSD after jitter).
class GenerationError : public std::runtime_error {
 public:
  explicit GenerationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mps
