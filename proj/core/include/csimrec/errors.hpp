#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace csimrec {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A scalar argument is outside its admissible domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Operand dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// The x-subproblem system is not positive definite on the observed space.
class SingularityError : public Error {
 public:
  using Error::Error;
};

// Nothing was observed, so there is nothing to recover from.
class UnrecoverableInputError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed file content. offset() is the byte position where parsing failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace csimrec
