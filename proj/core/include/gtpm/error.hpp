#pragma once

#include <stdexcept>
#include <string>

namespace gtpm {

// Error categories surfaced to callers. Persistence distinguishes
// version/truncation/digest failures so tools can report them precisely.
enum class ErrorKind {
  io,
  parse,
  invalid_argument,
  version_mismatch,
  truncated,
  digest_mismatch,
  numeric,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io: return "io";
    case ErrorKind::parse: return "parse";
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::version_mismatch: return "version_mismatch";
    case ErrorKind::truncated: return "truncated";
    case ErrorKind::digest_mismatch: return "digest_mismatch";
    case ErrorKind::numeric: return "numeric";
  }
  return "unknown";
}

}  // namespace gtpm
