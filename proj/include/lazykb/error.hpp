#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lazykb {

struct SourcePos {
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t offset = 0;
};

// Base of every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, SourcePos pos)
      : Error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + message),
        message_(message),
        pos_(pos) {}

  const std::string& message() const noexcept { return message_; }
  SourcePos position() const noexcept { return pos_; }

 private:
  std::string message_;
  SourcePos pos_;
};

// Unknown symbol, arity or sort mismatch, unbound variable, shadowing.
class TypeError : public Error {
 public:
  using Error::Error;
};

// Value outside a sort, non-total table, duplicate declaration.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Model requested from a knowledge base that has none.
class UnsatError : public Error {
 public:
  using Error::Error;
};

// Input outside the supported fragment (non-stratified definitions etc).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

}  // namespace lazykb
