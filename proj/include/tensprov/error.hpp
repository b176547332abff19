#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tensprov {

enum class ErrorKind {
  InvalidArgument,
  OutOfRange,
  NotFound,
  Io,
  Parse,
  TypeMismatch,
  NoPath,
  AmbiguousPath,
  PolicyViolation,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the engine. The kind drives the CLI error object.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace tensprov
