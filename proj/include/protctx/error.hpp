#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace protctx {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based; 0 when the error is not tied
/// to a single line.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& message);

  std::size_t line() const noexcept { return line_; }
  const std::string& source() const noexcept { return source_; }

 private:
  std::string source_;
  std::size_t line_;
};

/// Invalid run configuration or CLI usage. Raised before any work starts.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace protctx
