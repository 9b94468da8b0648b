#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace spade {

enum class ErrorKind {
  Io,
  EmptyInput,
  RaggedRow,
  NonNumeric,
  NonFinite,
  BadFormat,
  InvalidArgument,
  Disconnected,
  Unreachable,
  NonConvergence,
  SizeCapExceeded,
  ImproperCut,
  NonPositiveEigenvalue,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return "Io";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::RaggedRow: return "RaggedRow";
    case ErrorKind::NonNumeric: return "NonNumeric";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::BadFormat: return "BadFormat";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::Unreachable: return "Unreachable";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::SizeCapExceeded: return "SizeCapExceeded";
    case ErrorKind::ImproperCut: return "ImproperCut";
    case ErrorKind::NonPositiveEigenvalue: return "NonPositiveEigenvalue";
  }
  return "Unknown";
}

/// Location of a parse failure inside a text input. Both fields are 1-based.
struct SourcePos {
  std::size_t line = 0;
  std::size_t column = 0;
};

/// Every failure raised by the library. `kind()` is stable and meant for
/// programmatic dispatch; `what()` carries a human-readable message that
/// already includes the position when one is known.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<SourcePos> pos = std::nullopt)
      : std::runtime_error(format(kind, message, pos)), kind_(kind), pos_(pos) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::optional<SourcePos>& position() const noexcept { return pos_; }

 private:
  static std::string format(ErrorKind kind, const std::string& message,
                            const std::optional<SourcePos>& pos) {
    std::string out(to_string(kind));
    if (pos) {
      out += "(line=" + std::to_string(pos->line);
      if (pos->column != 0) out += ", column=" + std::to_string(pos->column);
      out += ")";
    }
    out += ": ";
    out += message;
    return out;
  }

  ErrorKind kind_;
  std::optional<SourcePos> pos_;
};

}  // namespace spade
