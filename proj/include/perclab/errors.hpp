#ifndef PERCLAB_ERRORS_HPP
#define PERCLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace perclab {

/**
 * Error categories thrown by the library.
 *
 * ARGUMENT errors indicate malformed inputs (bad probabilities, counts);
 * REGIME errors indicate structurally valid parameters for which the
 * requested quantity is undefined or unreachable; TRUNCATION is reserved
 * for the CLI exit-code mapping and never thrown.
 */
enum class ErrorKind {
  InvalidProbability,
  InvalidThreshold,
  InhibitionOnly,
  DegenerateBias,
  Subcritical,
  OutOfRegime,
  NoEscape,
  TargetUnreachable,
  TooLargeForEagerMode,
  WrongRegime,
};

/** Human-readable stable name for an error kind. */
inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidProbability: return "InvalidProbability";
    case ErrorKind::InvalidThreshold: return "InvalidThreshold";
    case ErrorKind::InhibitionOnly: return "InhibitionOnly";
    case ErrorKind::DegenerateBias: return "DegenerateBias";
    case ErrorKind::Subcritical: return "Subcritical";
    case ErrorKind::OutOfRegime: return "OutOfRegime";
    case ErrorKind::NoEscape: return "NoEscape";
    case ErrorKind::TargetUnreachable: return "TargetUnreachable";
    case ErrorKind::TooLargeForEagerMode: return "TooLargeForEagerMode";
    case ErrorKind::WrongRegime: return "WrongRegime";
  }
  return "UnknownError";
}

/** Base exception for all domain errors; carries a stable kind tag. */
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  const char* kind_name() const { return error_kind_name(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace perclab

#endif  // PERCLAB_ERRORS_HPP
