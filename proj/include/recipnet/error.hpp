#pragma once

#include <stdexcept>
#include <string>

namespace recipnet {

/// Process exit codes used by the command-line tool.
enum class ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kData = 2,
  kNumerical = 3,
};

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept { return ExitCode::kData; }
};

/// A caller violated a precondition (bad id, bad parameter, wrong shape).
class ArgumentError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kUsage; }
};

/// Malformed input text or binary image.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_ = 0;
};

/// Inputs are individually valid but disagree with each other.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// A metric has no value on this input (e.g. zero degree variance).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kNumerical; }
};

/// Non-finite values or a solver breakdown.
class NumericalError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kNumerical; }
};

}  // namespace recipnet
