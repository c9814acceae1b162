#pragma once

#include <stdexcept>
#include <string>

namespace brfw {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Raised when an iterative or adaptive routine fails; carries its best estimate.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double best_estimate = 0.0)
      : std::runtime_error(what), best_(best_estimate) {}
  double best_estimate() const { return best_; }

 private:
  double best_;
};

/// Kernel evaluated exactly on its diagonal.
class SingularPointError : public DomainError {
 public:
  using DomainError::DomainError;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace brfw
