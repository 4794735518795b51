#pragma once

#include <stdexcept>
#include <string>

namespace lcorr {

/// Failure categories raised by the engine. The CLI maps `Config` and
/// `UnknownScenario` to exit code 2 and everything else to exit code 1.
enum class ErrorKind {
  DegeneratePlane,
  NotLong,
  NotPSD,
  SingularMetric,
  GridMismatch,
  ConeViolation,
  DomainError,
  NotRiemannian,
  LostSpacelike,
  BudgetExceeded,
  UnknownScenario,
  Config,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DegeneratePlane: return "DegeneratePlane";
    case ErrorKind::NotLong: return "NotLong";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::SingularMetric: return "SingularMetric";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::ConeViolation: return "ConeViolation";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NotRiemannian: return "NotRiemannian";
    case ErrorKind::LostSpacelike: return "LostSpacelike";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::UnknownScenario: return "UnknownScenario";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace lcorr
