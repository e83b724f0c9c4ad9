// Error types shared across the toolkit.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace conndis {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed bracketed-tree input. Carries the byte offset of the defect.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (offset " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Resource could not be read or yielded nothing usable.
class LoadError : public Error {
 public:
  using Error::Error;
};

// Structured input violates the file format contract.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A function was called with arguments outside its precondition.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Model training could not proceed or diverged.
class TrainError : public Error {
 public:
  using Error::Error;
};

}  // namespace conndis
