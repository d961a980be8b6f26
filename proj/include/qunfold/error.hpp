#ifndef QUNFOLD_ERROR_HPP
#define QUNFOLD_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qunfold {

/// Base class for every failure raised by the library. The CLI maps these
/// to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed formula text. `offset` is the byte offset of the offending
/// character in the input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at byte " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Unfolding would exceed the configured depth or node cap.
class CapExceeded : public Error {
 public:
  CapExceeded(const std::string& what, std::size_t projected)
      : Error(what), projected_(projected) {}

  std::size_t projected() const noexcept { return projected_; }

 private:
  std::size_t projected_;
};

}  // namespace qunfold

#endif
