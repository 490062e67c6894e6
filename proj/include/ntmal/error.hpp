#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ntmal {

enum class ErrorKind {
  EmptyTrace,
  Io,
  Parse,
  EmptyVocabulary,
  DimensionMismatch,
  DegenerateLabels,
  InsufficientData,
  LengthMismatch,
  SingleClass,
  ConfigInvalid,
  VersionMismatch,
};

std::string_view to_string(ErrorKind kind);

// Every failure surfaced by the library carries a kind so callers (and the
// CLI exit path) can branch on it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ntmal
