#include "mvlab/error.hpp"

#include <sstream>

namespace mvlab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfiguration: return "invalid_configuration";
    case ErrorKind::IncompatibleGrids: return "incompatible_grids";
    case ErrorKind::StepRejected: return "step_rejected";
    case ErrorKind::NumericalFailure: return "numerical_failure";
    case ErrorKind::InsufficientData: return "insufficient_data";
    case ErrorKind::InvalidBracket: return "invalid_bracket";
    case ErrorKind::NonMonotoneVerdicts: return "non_monotone_verdicts";
    case ErrorKind::Parse: return "parse_error";
    case ErrorKind::Validation: return "validation_error";
    case ErrorKind::Usage: return "usage_error";
    case ErrorKind::Io: return "io_error";
  }
  return "unknown";
}

namespace {
std::string step_message(double requested, double admissible) {
  std::ostringstream os;
  os.precision(6);
  os << "time step " << requested << " exceeds the stability bound " << admissible;
  return os.str();
}
}  // namespace

StepRejected::StepRejected(double requested, double admissible)
    : Error(ErrorKind::StepRejected, step_message(requested, admissible)),
      requested_(requested),
      admissible_(admissible) {}

}  // namespace mvlab
