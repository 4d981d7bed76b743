#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace streamspec {

using Point = std::vector<double>;
using PointView = std::span<const double>;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

/// Axis-aligned box, one interval per coordinate.
using Box = std::vector<Interval>;

double norm2(PointView x);
double distance(PointView a, PointView b);

// Error kinds raised across the library. All derive from Error so callers
// that only care about failure can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point or argument violates an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Malformed or incomplete problem / run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: step-size underflow, insufficient data, etc.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// An estimator was handed an empty phase class.
class EmptyClassError : public Error {
 public:
  using Error::Error;
};

/// Ω₃ carries mass, so the half-plane/disk assembly does not apply and the
/// per-class composition has to be used instead.
class CompositionRequiredError : public Error {
 public:
  using Error::Error;
};

}  // namespace streamspec
