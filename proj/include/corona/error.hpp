#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace corona {

enum class ErrorKind {
  InvalidArgument,      // parameter invariant violated
  IndexOutOfRange,
  ModelInfeasible,      // head fraction p_i > 1
  Infeasible,           // no width vector satisfies the constraints
  NonConvergence,
  GridTooLarge,
  InfeasibleProvision,  // more clusters than nodes in a corona
  SchemaMismatch,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::ModelInfeasible: return "ModelInfeasible";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::GridTooLarge: return "GridTooLarge";
    case ErrorKind::InfeasibleProvision: return "InfeasibleProvision";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace corona
