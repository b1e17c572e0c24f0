#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oppfl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes of vectors/matrices/label spaces do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A scalar argument is outside its allowed range (non-positive lambda,
// zero-sized request, exponent outside (0,2], ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A dataset is empty or otherwise unusable for the requested operation.
class DataError : public Error {
 public:
  using Error::Error;
};

// A sampling request exceeds the available samples of some label.
class CapacityError : public Error {
 public:
  CapacityError(const std::string& msg, int label) : Error(msg), label_(label) {}
  int label() const noexcept { return label_; }

 private:
  int label_;
};

// Malformed binary input (IDX files, serialized parameter blobs).
class FormatError : public Error {
 public:
  FormatError(const std::string& msg, std::size_t byte_offset)
      : Error(msg + " (at byte " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}
  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

// Invalid scenario/run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace oppfl
