#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cohlab {

enum class ErrorKind {
  NotHermitian,
  NotUnitTrace,
  NotPSD,
  NotSquare,
  ConvergenceFailure,
  DimensionMismatch,
  DegenerateState,
  IncompleteChannel,
  InfeasiblePattern,
  NotPure,
  BadPartition,
  NotIncoherentChannel,
  ParseError,
  UnknownFixture,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotUnitTrace: return "NotUnitTrace";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateState: return "DegenerateState";
    case ErrorKind::IncompleteChannel: return "IncompleteChannel";
    case ErrorKind::InfeasiblePattern: return "InfeasiblePattern";
    case ErrorKind::NotPure: return "NotPure";
    case ErrorKind::BadPartition: return "BadPartition";
    case ErrorKind::NotIncoherentChannel: return "NotIncoherentChannel";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnknownFixture: return "UnknownFixture";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cohlab
