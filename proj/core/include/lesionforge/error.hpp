#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lesionforge {

/// Failure categories shared by every module. The textual form of a kind is
/// the stable prefix of Error::what(), e.g. "empty-foreground: ...".
enum class ErrorKind {
  InvalidInput,
  InvalidParameter,
  EmptyForeground,
  NonBinaryMask,
  CorruptHeader,
  Format,
  UnsupportedDatatype,
  CorruptFile,
  Io,
  Config,
  DuplicateId,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }

  /// Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace lesionforge
