#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qsd {

enum class ErrorKind {
  InvalidDimension,
  DimensionMismatch,
  Contract,
  Parse,
  InvalidStep,
  NumericalBlowup,
  TruncationLeak,
  IntegratorStepTooLarge,
  UnknownScenario,
  Config,
  Io,
};

/// Machine-readable category name, e.g. "numerical-blowup".
std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qsd
