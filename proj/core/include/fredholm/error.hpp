#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fredholm {

enum class ErrorKind {
  InvalidSymbol,
  NotFredholm,
  GridResolution,
  Convergence,
  BandwidthInsufficient,
  Dimension,
  TruncationTooSmall,
  EmptyOperator,
  Precondition,
  Parse,
  Io,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it to an exit code without parsing messages.
class FredholmError : public std::runtime_error {
 public:
  FredholmError(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fredholm
