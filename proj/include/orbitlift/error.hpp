#pragma once

#include <stdexcept>
#include <string>

namespace orbitlift {

enum class ErrorKind {
  DimensionMismatch,
  NotOrthogonal,
  OrderExceeded,
  NonHyperbolic,
  Inconsistent,
  MissingFiberOracle,
  WindowTooSmall,
  LemmaViolated,
  NotInOrbit,
  ResidualExceeded,
  OrbitMismatch,
  IsotropyInsufficient,
  ParseError,
  InvalidArgument,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotOrthogonal: return "NotOrthogonal";
    case ErrorKind::OrderExceeded: return "OrderExceeded";
    case ErrorKind::NonHyperbolic: return "NonHyperbolic";
    case ErrorKind::Inconsistent: return "Inconsistent";
    case ErrorKind::MissingFiberOracle: return "MissingFiberOracle";
    case ErrorKind::WindowTooSmall: return "WindowTooSmall";
    case ErrorKind::LemmaViolated: return "LemmaViolated";
    case ErrorKind::NotInOrbit: return "NotInOrbit";
    case ErrorKind::ResidualExceeded: return "ResidualExceeded";
    case ErrorKind::OrbitMismatch: return "OrbitMismatch";
    case ErrorKind::IsotropyInsufficient: return "IsotropyInsufficient";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace orbitlift
