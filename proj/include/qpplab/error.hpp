#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qpplab {

enum class ErrorKind {
  Parse,            // malformed input line
  Duplicate,        // duplicate key in an input
  MissingQuery,     // query absent from a required input
  DegenerateQuery,  // query has no effective terms
  Alignment,        // empty query intersection
  Config,           // inconsistent parameters
  Undefined,        // statistic undefined on this input (constant column, all ties)
  SampleSize,       // too few observations
  DivisionByZero,
  Dimension,
  Merge,            // column-name clash while merging tables
  Protocol,         // in-fold routing and similar misuse
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Parse errors carry the source name and 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what);

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

}  // namespace qpplab
