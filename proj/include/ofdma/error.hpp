#pragma once

#include <stdexcept>
#include <string>

namespace ofdma {

// Exit codes surfaced by the CLI.
enum class ExitCode : int {
  ok = 0,
  config_error = 2,
  degenerate_scenario = 3,
  io_error = 4,
};

/// Malformed inputs: CQI out of range, bad table rows, dimension mismatch.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Nothing to optimize: zero efficiency everywhere and no GBR demand.
class DegenerateScenario : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fewer samples than the model needs (e.g. k-means rows < K).
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Metric has no defined value for the input (all-zero rates, no GBR UEs).
class UndefinedMetric : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace ofdma
