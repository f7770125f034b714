#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace cgp {

// A configuration problem attributable to a single parameter key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(message), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// A value that parsed but violates a parameter invariant.
class ValidationError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Malformed line in a line-oriented input file.
class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Input that is well-formed but internally inconsistent (e.g. declared vs. actual row count).
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Caller broke an operation precondition.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cgp
