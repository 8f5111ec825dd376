#pragma once

#include <stdexcept>
#include <string>

namespace ringform {

// Input outside the mathematical domain of an operation (odd n for an
// antipodal distance, a pole in angle coordinates, a non-equilibrium
// passed to the spectral classifier, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Rejection sampling ran out of attempts.
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid simulation or experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite values or other breakdown during integration.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ringform
