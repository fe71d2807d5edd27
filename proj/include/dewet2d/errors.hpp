#pragma once

#include <stdexcept>
#include <string>

namespace dewet {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A curve violates its structural invariants (contacts off the substrate,
/// crossed contacts, too few segments, non-finite coordinates).
class InvalidCurveError : public Error {
public:
  using Error::Error;
};

/// A segment of the reference polygon has (numerically) zero length.
class DegenerateMeshError : public Error {
public:
  using Error::Error;
};

/// The reference curve fails the well-posedness conditions required for the
/// one-step linear system to have a unique solution.
class WellPosednessError : public Error {
public:
  using Error::Error;
};

/// The assembled linear system could not be solved to tolerance.
class SolveError : public Error {
public:
  using Error::Error;
};

/// A time step failed; carries step index / phase context in the message.
class StepError : public Error {
public:
  using Error::Error;
};

/// The substrate-closed boundary polygon is self-intersecting.
class NonSimpleRegionError : public Error {
public:
  using Error::Error;
};

/// Invalid run configuration (bad key, malformed value, domain violation).
class ConfigError : public Error {
public:
  using Error::Error;
};

/// File I/O problem (missing file, malformed CSV, unwritable output).
class IoError : public Error {
public:
  using Error::Error;
};

} // namespace dewet
