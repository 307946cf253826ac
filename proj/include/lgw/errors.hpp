#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lgw {

enum class ErrorKind {
  config,
  domain,
  parse,
  resource,
  convergence,
  unreachable_state,
  reconstruction,
  integrity,
  unsupported,
  internal,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every library failure is an Error carrying a kind; the CLI prints
// "error[<kind>]: <message>" on standard error.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : Error(ErrorKind::parse, message + " at byte " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace lgw
