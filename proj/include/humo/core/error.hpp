#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace humo {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed structured text (model files, configs, motion records).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Input parsed fine but violates a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Shape or length mismatch between operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class VersionError : public Error {
 public:
  using Error::Error;
};

/// A record inside a line-delimited file could not be decoded.
class CorruptRecordError : public Error {
 public:
  CorruptRecordError(std::size_t record, const std::string& what);
  std::size_t record() const { return record_; }

 private:
  std::size_t record_;
};

class HashMismatchError : public Error {
 public:
  HashMismatchError(const std::string& what, const std::string& expected,
                    const std::string& actual);
};

class MissingArtifactError : public Error {
 public:
  explicit MissingArtifactError(const std::string& path);
};

/// A computation produced NaN or infinity.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(std::size_t step);
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

}  // namespace humo
