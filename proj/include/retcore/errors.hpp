#pragma once

#include <stdexcept>
#include <string>

namespace retcore {

// Error taxonomy used for CLI exit codes: ConfigError -> 1, IoError -> 2,
// NumericError -> 3.

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid UTF-8 input; message carries the byte offset of the offending byte.
class EncodingError : public IoError {
 public:
  EncodingError(std::size_t byte_offset, const std::string& what)
      : IoError(what + " (byte offset " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

// Weight-file failures, each distinct so callers can tell them apart.
class BadMagicError : public IoError {
 public:
  using IoError::IoError;
};

class FormatVersionError : public IoError {
 public:
  using IoError::IoError;
};

class HeaderError : public IoError {
 public:
  using IoError::IoError;
};

class TruncatedFileError : public IoError {
 public:
  using IoError::IoError;
};

// Value outside its documented domain (e.g. codepoint >= 2^bits_per_char).
class ValueRangeError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Data failed a structural check (e.g. a bit matrix entry not in {0, 1}).
class ValidationError : public NumericError {
 public:
  using NumericError::NumericError;
};

// An embedding with zero norm where cosine similarity is required.
class DegenerateEmbeddingError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace retcore
