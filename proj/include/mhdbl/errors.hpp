#pragma once

#include <stdexcept>
#include <string>

namespace mhdbl {

// Bad user input (config keys, parameter ranges, unsupported scenarios).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A Psi-weighted quantity is not representable or its tail is not negligible.
class TailViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Analytic radius delta - lambda*theta exhausted (T* reached).
class RadiusExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values appeared in the state.
class Divergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A structural identity of the discrete state does not hold (e.g. flux drift).
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mhdbl
