#include "qsd/error.hpp"

namespace qsd {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "invalid-dimension";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::Contract: return "contract";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::InvalidStep: return "invalid-step";
    case ErrorKind::NumericalBlowup: return "numerical-blowup";
    case ErrorKind::TruncationLeak: return "truncation-leak";
    case ErrorKind::IntegratorStepTooLarge: return "integrator-step-too-large";
    case ErrorKind::UnknownScenario: return "unknown-scenario";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace qsd
