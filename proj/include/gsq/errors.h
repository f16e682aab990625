#ifndef GSQ_ERRORS_H_
#define GSQ_ERRORS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace gsq {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input. `offset` is the byte position where decoding failed, when
// the input is positional.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
  ParseError(const std::string& what, std::uint64_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::optional<std::uint64_t> offset() const { return offset_; }

 private:
  std::optional<std::uint64_t> offset_;
};

// Well-formed bytes whose content breaks a model invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Geometric degeneracy (zero vector, coincident points, empty rig, ...).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Quantized container that does not decode consistently.
class DecodeError : public Error {
 public:
  using Error::Error;
};

// File system failure; the message carries the path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gsq

#endif  // GSQ_ERRORS_H_
