#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace alaam {

// Base of every recoverable error raised by the library. Programming errors
// (violated preconditions on internal calls) are asserts, not exceptions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LoadError : public Error {
 public:
  enum class Code {
    Io,
    MalformedHeader,
    NodeOutOfRange,
    SelfLoop,
    WithinModeEdge,
    RowCountMismatch,
    BadToken,
    DuplicateColumn,
    ZoneSpan,
  };

  // line is 1-based; 0 when the error is not attached to one line.
  LoadError(Code code, std::string source, std::size_t line, const std::string& what);

  Code code() const noexcept { return code_; }
  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  Code code_;
  std::string source_;
  std::size_t line_;
};

// Invalid model specification: unknown effect, wrong network kind, bad attribute.
class ModelError : public Error {
 public:
  using Error::Error;
};

// Statistic covariance is (computationally) singular.
class DegenerateModel : public Error {
 public:
  using Error::Error;
};

// Parameter iterates became non-finite or exceeded the divergence bound.
class Diverged : public Error {
 public:
  using Error::Error;
};

class NoConvergedRuns : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class StudyError : public Error {
 public:
  using Error::Error;
};

}  // namespace alaam
