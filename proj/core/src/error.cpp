#include "lesionforge/error.hpp"

namespace lesionforge {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::EmptyForeground: return "empty-foreground";
    case ErrorKind::NonBinaryMask: return "non-binary-mask";
    case ErrorKind::CorruptHeader: return "corrupt-header";
    case ErrorKind::Format: return "format";
    case ErrorKind::UnsupportedDatatype: return "unsupported-datatype";
    case ErrorKind::CorruptFile: return "corrupt-file";
    case ErrorKind::Io: return "io";
    case ErrorKind::Config: return "config";
    case ErrorKind::DuplicateId: return "duplicate-id";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
      kind_(kind),
      detail_(detail) {}

}  // namespace lesionforge
