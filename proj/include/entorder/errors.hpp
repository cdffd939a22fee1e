#pragma once

#include <stdexcept>
#include <string>

namespace entorder {

enum class ErrorKind {
  NotHermitian,
  NotUnitTrace,
  NotPositive,
  DimensionMismatch,
  DomainError,
  NegativeEigenvalue,
  EpsilonTooLarge,
  IncompatibleMeasure,
  LengthMismatch,
  ParseError,
  IoError,
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotUnitTrace: return "NotUnitTrace";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NegativeEigenvalue: return "NegativeEigenvalue";
    case ErrorKind::EpsilonTooLarge: return "EpsilonTooLarge";
    case ErrorKind::IncompatibleMeasure: return "IncompatibleMeasure";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + msg), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

}  // namespace entorder
