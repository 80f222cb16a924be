#pragma once

#include <stdexcept>
#include <string>

namespace dpd {

enum class ErrorKind {
  configuration,
  degenerate_input,
  insufficient_data,
  conditioning,
  divergence,
  correctness,
  io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base for every failure raised by the toolkit. The kind lets the CLI and
/// tests distinguish failure classes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::configuration, what) {}
};

class DegenerateInputError : public Error {
 public:
  explicit DegenerateInputError(const std::string& what)
      : Error(ErrorKind::degenerate_input, what) {}
};

class InsufficientDataError : public Error {
 public:
  explicit InsufficientDataError(const std::string& what)
      : Error(ErrorKind::insufficient_data, what) {}
};

/// Carries the condition estimate that triggered the failure.
class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& what, double condition)
      : Error(ErrorKind::conditioning, what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& what)
      : Error(ErrorKind::divergence, what) {}
};

class CorrectnessError : public Error {
 public:
  explicit CorrectnessError(const std::string& what)
      : Error(ErrorKind::correctness, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

}  // namespace dpd
