#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bnpl {

// Invalid distribution parameter (nonpositive shape, rate, mean, ...).
class ParameterDomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid experiment configuration or hyperparameters. CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data. CLI exit code 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical breakdown inside a sampler. CLI exit code 4.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Cholesky factorization hit a nonpositive pivot.
class FactorizationError : public NumericalError {
 public:
  FactorizationError(std::size_t pivot, const std::string& what)
      : NumericalError(what), pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

}  // namespace bnpl
