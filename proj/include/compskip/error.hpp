#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace compskip {

/// Bad input data: corpus, dataset, embedding or checkpoint files.
/// The CLI maps this to exit status 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed chunk-annotated line. offset() is the byte offset into the line.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : DataError(what + " at byte " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Invalid hyperparameters or option values. The CLI maps this to exit status 1.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace compskip
