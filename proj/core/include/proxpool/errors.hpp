#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace proxpool {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A dataset file is missing or unreadable.
class IngestionError : public Error {
 public:
  IngestionError(const std::string& file, const std::string& what)
      : Error(file + ": " + what), file_(file) {}
  const std::string& file() const noexcept { return file_; }

 private:
  std::string file_;
};

/// Malformed content in a dataset file; carries the 1-based line number.
class FormatError : public Error {
 public:
  FormatError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), file_(file), line_(line) {}
  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

/// Non-finite values, failed eigensolves, and similar numerical breakdowns.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A caller violated an operation precondition (shape, sign, range).
class ContractError : public Error {
 public:
  using Error::Error;
};

class SplitError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace proxpool
