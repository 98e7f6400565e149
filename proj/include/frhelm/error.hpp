#pragma once

#include <stdexcept>
#include <string>

namespace frhelm {

enum class ErrorKind {
  InvalidParams,
  NonConvergent,
  OutOfRegime,
  Overflow,
  DomainError,
  DegenerateSystem,
  EpsOutOfRange,
  ParseError,
  DifferentiationUnsupported,
  InsufficientData,
  CompatibilityFailure,
  UnknownMode,
  GridTooCoarse,
  AsymmetricGrid,
  ConfigError,
  IoError,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::OutOfRegime: return "OutOfRegime";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::DegenerateSystem: return "DegenerateSystem";
    case ErrorKind::EpsOutOfRange: return "EpsOutOfRange";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DifferentiationUnsupported: return "DifferentiationUnsupported";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::CompatibilityFailure: return "CompatibilityFailure";
    case ErrorKind::UnknownMode: return "UnknownMode";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::AsymmetricGrid: return "AsymmetricGrid";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Base exception for everything the library throws. The kind lets callers
/// (the CLI in particular) map failures to exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for failures caused by bad input rather than by the numerics.
  bool is_validation() const noexcept {
    switch (kind_) {
      case ErrorKind::InvalidParams:
      case ErrorKind::DomainError:
      case ErrorKind::EpsOutOfRange:
      case ErrorKind::ParseError:
      case ErrorKind::DifferentiationUnsupported:
      case ErrorKind::CompatibilityFailure:
      case ErrorKind::UnknownMode:
      case ErrorKind::GridTooCoarse:
      case ErrorKind::AsymmetricGrid:
      case ErrorKind::ConfigError:
      case ErrorKind::IoError:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t column, const std::string& what)
      : Error(ErrorKind::ParseError, "column " + std::to_string(column) + ": " + what),
        column_(column) {}

  /// 1-based column of the offending character (one past the end for EOF).
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

}  // namespace frhelm
