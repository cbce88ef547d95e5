#ifndef HEXWAVE_ERRORS_HPP
#define HEXWAVE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hexwave {

enum class ErrorKind {
  Config,
  NoDegeneracyFound,
  HigherDegeneracy,
  SymmetryMismatch,
  DegenerateVelocity,
  StructureViolation,
  ComplexMu,
  BoxTooSmall,
  SupportOverflow,
  GridMismatch,
  Numerical,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::NoDegeneracyFound: return "NoDegeneracyFound";
    case ErrorKind::HigherDegeneracy: return "HigherDegeneracy";
    case ErrorKind::SymmetryMismatch: return "SymmetryMismatch";
    case ErrorKind::DegenerateVelocity: return "DegenerateVelocity";
    case ErrorKind::StructureViolation: return "StructureViolation";
    case ErrorKind::ComplexMu: return "ComplexMu";
    case ErrorKind::BoxTooSmall: return "BoxTooSmall";
    case ErrorKind::SupportOverflow: return "SupportOverflow";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::Numerical: return "NumericalError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(to_string(kind)) + ": " + msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hexwave

#endif
