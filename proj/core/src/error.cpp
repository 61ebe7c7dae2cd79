#include "fredholm/error.hpp"

namespace fredholm {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidSymbol: return "invalid-symbol";
    case ErrorKind::NotFredholm: return "not-fredholm";
    case ErrorKind::GridResolution: return "grid-resolution";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::BandwidthInsufficient: return "bandwidth-insufficient";
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::TruncationTooSmall: return "truncation-too-small";
    case ErrorKind::EmptyOperator: return "empty-operator";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

FredholmError::FredholmError(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace fredholm
