#pragma once

#include <stdexcept>
#include <string>

namespace polariton {

/// Invalid physical parameters or operation preconditions.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed (non-finite state, step underflow, ...).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IntegrationError : public SolverError {
 public:
  IntegrationError(const std::string& what, double time)
      : SolverError(what + " at t = " + std::to_string(time) + " s"), time_(time) {}

  double time() const { return time_; }

 private:
  double time_;
};

/// Malformed run configuration. `key()` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error("config key '" + key + "': " + what), key_(key) {}

  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace polariton
