#pragma once

#include <stdexcept>
#include <string>

namespace awflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The query point lies outside the tube where the projection is single-valued.
class AmbiguousProjection : public Error {
 public:
  using Error::Error;
};

class InfeasibleSet : public Error {
 public:
  using Error::Error;
};

class NotOnSet : public Error {
 public:
  using Error::Error;
};

class ProjectionNoConverge : public Error {
 public:
  using Error::Error;
};

/// Finite-difference sequence failed the Cauchy test.
class NonConvergent : public Error {
 public:
  using Error::Error;
};

class EmptySublevel : public Error {
 public:
  using Error::Error;
};

class NonFiniteState : public Error {
 public:
  using Error::Error;
};

class NotApplicable : public Error {
 public:
  using Error::Error;
};

class NotConverged : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration. `field()` is the dotted path of the
/// offending key, e.g. "set.radius".
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error("config error at '" + field + "': " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

namespace qp {

class Infeasible : public Error {
 public:
  using Error::Error;
};

class MaxIterations : public Error {
 public:
  using Error::Error;
};

}  // namespace qp

}  // namespace awflow
