#pragma once

#include <stdexcept>
#include <string>

namespace tin {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a ground-truth map has no positive or no negative pixels.
class DegenerateLabelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or unreadable input data (files, manifests, checkpoints, configs).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ChecksumError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace tin
