#pragma once

#include <stdexcept>
#include <string>

namespace ianmt {

/// Bad input data: missing files, empty corpora, malformed checkpoints.
/// The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Numeric failure: a non-finite loss or gradient. CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Bad configuration or command-line usage. CLI exit code 1.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ianmt
