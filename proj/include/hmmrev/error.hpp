#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hmmrev {

enum class ErrorKind {
  SingularSystem,
  InvalidMatrix,
  NotIrreducible,
  InvalidEmission,
  IndexOutOfRange,
  SymbolOutOfRange,
  InvalidQuery,
  QueryTooLong,
  ScanTooLarge,
  ImaginaryResidue,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::InvalidMatrix: return "InvalidMatrix";
    case ErrorKind::NotIrreducible: return "NotIrreducible";
    case ErrorKind::InvalidEmission: return "InvalidEmission";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::SymbolOutOfRange: return "SymbolOutOfRange";
    case ErrorKind::InvalidQuery: return "InvalidQuery";
    case ErrorKind::QueryTooLong: return "QueryTooLong";
    case ErrorKind::ScanTooLarge: return "ScanTooLarge";
    case ErrorKind::ImaginaryResidue: return "ImaginaryResidue";
  }
  return "Unknown";
}

/// Every library failure is reported through this one exception type; the
/// kind is what callers (and the CLI exit-code mapping) switch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return to_string(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace hmmrev
