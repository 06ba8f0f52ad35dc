#pragma once

#include <stdexcept>
#include <string>

namespace rulekit {

/// Malformed or unsupported input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Hyperparameter or configuration outside its valid domain.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File-system failures and malformed persisted models.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rulekit
