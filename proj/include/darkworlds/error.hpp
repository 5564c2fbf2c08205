#ifndef DARKWORLDS_ERROR_HPP
#define DARKWORLDS_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace darkworlds {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Galaxy/halo distance below the configured guard.
class SingularityError : public Error {
public:
  using Error::Error;
};

/// Invalid configuration or argument values.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Position in a source text, both 1-based.
struct SourcePos {
  int line = 1;
  int column = 1;
};

/// Errors that carry a position in model source.
class SourceError : public Error {
public:
  SourceError(const std::string& what, SourcePos pos)
      : Error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + what),
        pos_(pos) {}

  SourcePos pos() const noexcept { return pos_; }

private:
  SourcePos pos_;
};

class LexError : public SourceError {
public:
  using SourceError::SourceError;
};

class ParseError : public SourceError {
public:
  using SourceError::SourceError;
};

class CompileError : public Error {
public:
  using Error::Error;
};

/// Malformed data file; line is 1-based (0 when the file could not be opened).
class FormatError : public Error {
public:
  FormatError(const std::string& path, std::size_t line, const std::string& what)
      : Error(path + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

}  // namespace darkworlds

#endif  // DARKWORLDS_ERROR_HPP
