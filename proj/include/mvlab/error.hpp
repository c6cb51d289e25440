#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace mvlab {

enum class ErrorKind {
  InvalidConfiguration,
  IncompatibleGrids,
  StepRejected,
  NumericalFailure,
  InsufficientData,
  InvalidBracket,
  NonMonotoneVerdicts,
  Parse,
  Validation,
  Usage,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Base exception for every failure raised by the library. The kind is
/// stable and is what the CLI serializes into its error record.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by a single explicit step whose time step exceeds the stability
/// bound; carries the largest admissible step for the current state.
class StepRejected : public Error {
 public:
  StepRejected(double requested, double admissible);

  double requested_dt() const noexcept { return requested_; }
  double admissible_dt() const noexcept { return admissible_; }

 private:
  double requested_;
  double admissible_;
};

/// Validation failure tied to a field path in a configuration document,
/// e.g. "solver.dt".
class ValidationError : public Error {
 public:
  ValidationError(std::string path, const std::string& what)
      : Error(ErrorKind::Validation, path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace mvlab
