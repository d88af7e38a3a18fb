#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace slabtune {

// Base for every error the library raises. The CLI maps all of these to
// exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. `line` is 1-based; 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that violates a precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// An item does not fit in the largest chunk of a configuration.
class OversizeError : public Error {
 public:
  OversizeError(std::uint64_t size, std::uint64_t largest_chunk)
      : Error("oversize item: " + std::to_string(size) +
              " bytes exceeds largest chunk " + std::to_string(largest_chunk)),
        size_(size) {}

  std::uint64_t size() const noexcept { return size_; }

 private:
  std::uint64_t size_;
};

// Connection, send/receive, or timeout failure.
class TransportError : public Error {
 public:
  using Error::Error;
};

// The server answered with something outside the expected grammar.
class ProtocolError : public Error {
 public:
  ProtocolError(const std::string& what, std::string payload)
      : Error(what), payload_(std::move(payload)) {}

  const std::string& payload() const noexcept { return payload_; }

 private:
  std::string payload_;
};

}  // namespace slabtune
