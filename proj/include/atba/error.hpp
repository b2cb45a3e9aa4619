#pragma once

#include <stdexcept>
#include <string>

namespace atba {

// Failure categories surfaced by the library. Every thrown error carries one
// of these so callers (and the CLI) can map failures to diagnostics without
// matching message strings.
enum class ErrorKind {
  Validation,
  Index,
  Config,
  Format,
  NoTransition,
  EmptyCandidates,
  InfeasibleAlignment,
  DegenerateCentroid,
  OracleTooLarge,
  UndefinedMetric,
  Generator,
  Io,
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Index: return "index";
    case ErrorKind::Config: return "config";
    case ErrorKind::Format: return "format";
    case ErrorKind::NoTransition: return "no-transition";
    case ErrorKind::EmptyCandidates: return "empty-candidates";
    case ErrorKind::InfeasibleAlignment: return "infeasible-alignment";
    case ErrorKind::DegenerateCentroid: return "degenerate-centroid";
    case ErrorKind::OracleTooLarge: return "oracle-too-large";
    case ErrorKind::UndefinedMetric: return "undefined-metric";
    case ErrorKind::Generator: return "generator";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace atba
