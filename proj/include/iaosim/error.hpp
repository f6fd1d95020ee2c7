#pragma once

#include <stdexcept>
#include <string>

namespace iaosim {

enum class ErrorKind {
  // input / validation
  UnknownBus,
  DuplicateId,
  IslandedAreaInterior,
  UnknownArea,
  UnknownParameterPath,
  DimensionMismatch,
  ParseError,
  SchemaError,
  ValidationError,
  // numerical
  SingularReduction,
  NoConvergence,
  DefectiveMode,
  AmbiguousMatch,
  StepTooLarge,
  // i/o
  IoError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Process exit status for an error category: 2 validation, 3 numerical, 4 I/O.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularReduction:
    case ErrorKind::NoConvergence:
    case ErrorKind::DefectiveMode:
    case ErrorKind::AmbiguousMatch:
    case ErrorKind::StepTooLarge:
      return 3;
    case ErrorKind::IoError:
      return 4;
    default:
      return 2;
  }
}

}  // namespace iaosim
