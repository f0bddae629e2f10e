#pragma once

#include <stdexcept>
#include <string>

namespace gegennet {

/// Malformed input data: bad edge-list lines, inconsistent manifests,
/// unreadable caches or checkpoints, shape mismatches between artifacts.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration supplied by the caller.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Solver non-convergence, non-finite activations or a diverging loss.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gegennet
