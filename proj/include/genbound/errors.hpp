#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace genbound {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// An exhaustive enumeration would exceed its configured cap.
class ExactEnumerationLimit : public Error {
 public:
  ExactEnumerationLimit(const std::string& what, std::uint64_t requested, std::uint64_t cap)
      : Error(what + ": requested " + std::to_string(requested) + " exceeds exact-enumeration cap " +
              std::to_string(cap)),
        requested_(requested),
        cap_(cap) {}

  std::uint64_t requested() const noexcept { return requested_; }
  std::uint64_t cap() const noexcept { return cap_; }

 private:
  std::uint64_t requested_;
  std::uint64_t cap_;
};

// Errors that carry a serialized instance (JSON text) for reproduction.
class DetailedError : public Error {
 public:
  DetailedError(const std::string& what, std::string details)
      : Error(what), details_(std::move(details)) {}

  const std::string& details() const noexcept { return details_; }

 private:
  std::string details_;
};

class InvariantViolation : public DetailedError {
 public:
  using DetailedError::DetailedError;
};

class InequalityViolation : public DetailedError {
 public:
  using DetailedError::DetailedError;
};

class MissingPopulationMeans : public Error {
 public:
  MissingPopulationMeans() : Error("uniform deviation requires population means") {}
};

class InvalidEnvelope : public Error {
 public:
  using Error::Error;
};

class InvalidDelta : public Error {
 public:
  using Error::Error;
};

class InvalidRadius : public Error {
 public:
  using Error::Error;
};

/// Every row of the class has zero empirical norm.
class DegenerateClass : public Error {
 public:
  using Error::Error;
};

}  // namespace genbound
