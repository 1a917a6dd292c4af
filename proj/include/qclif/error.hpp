#pragma once

#include <stdexcept>
#include <string>

namespace qclif {

// Coarse failure classes. The CLI maps these onto exit codes.
enum class ErrorCategory { usage, config, io, numeric };

class Error : public std::runtime_error {
public:
  Error(ErrorCategory category, const std::string &what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

private:
  ErrorCategory category_;
};

class OverflowError : public Error {
public:
  explicit OverflowError(const std::string &what)
      : Error(ErrorCategory::numeric, "overflow: " + what) {}
};

class ScaleMismatch : public Error {
public:
  explicit ScaleMismatch(const std::string &what)
      : Error(ErrorCategory::numeric, "scale mismatch: " + what) {}
};

class DimensionMismatch : public Error {
public:
  explicit DimensionMismatch(const std::string &what)
      : Error(ErrorCategory::config, "dimension mismatch: " + what) {}
};

class NonFiniteInput : public Error {
public:
  explicit NonFiniteInput(const std::string &what)
      : Error(ErrorCategory::numeric, "non-finite input: " + what) {}
};

class ConfigError : public Error {
public:
  explicit ConfigError(const std::string &what)
      : Error(ErrorCategory::config, what) {}
};

class IoError : public Error {
public:
  explicit IoError(const std::string &what) : Error(ErrorCategory::io, what) {}
};

const char *category_name(ErrorCategory c) noexcept;

} // namespace qclif
