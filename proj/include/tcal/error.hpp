#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tcal {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
public:
  using Error::Error;
};

/// Input text did not parse. `line()` is 1-based; 0 when unknown.
class ParseError : public Error {
public:
  ParseError(const std::string &what, std::size_t line);
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Parsed data violates a domain invariant (count, id, unit norm, ...).
class ValidationError : public Error {
public:
  using Error::Error;
};

/// A file has the wrong schema name, version or header.
class SchemaError : public Error {
public:
  using Error::Error;
};

/// Too few usable records to fit a calibration.
class InsufficientDataError : public Error {
public:
  using Error::Error;
};

/// Dipole evaluated too close to the source.
class SingularityError : public Error {
public:
  using Error::Error;
};

class FrameError : public Error {
public:
  enum class Kind { unknown_taxel, unknown_frame_id, malformed_payload };

  FrameError(Kind kind, const std::string &what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

private:
  Kind kind_;
};

/// A timestamped stream was not non-decreasing at `index()`.
class UnsortedStreamError : public Error {
public:
  UnsortedStreamError(const std::string &stream, std::size_t index);
  const std::string &stream() const noexcept { return stream_; }
  std::size_t index() const noexcept { return index_; }

private:
  std::string stream_;
  std::size_t index_;
};

} // namespace tcal
