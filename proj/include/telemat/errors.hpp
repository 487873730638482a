#pragma once

#include <stdexcept>
#include <string>

namespace telemat {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A per-particle basis digit or flat index is out of range.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Operand shapes or composite dimensions do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Zero vector where a direction is required.
class DegenerateStateError : public Error {
 public:
  using Error::Error;
};

class InvalidPermutation : public Error {
 public:
  using Error::Error;
};

class InvalidPartition : public Error {
 public:
  using Error::Error;
};

/// A measurement basis failed orthonormality, or a state failed its norm check.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace telemat
