#pragma once
#include <stdexcept>
#include <string>

namespace mkdvut {

// Every failure mode the engine can signal has a named type so callers (and the
// CLI exit-code mapping) can distinguish configuration problems, violated
// hypotheses, and numerical breakdowns.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Configuration / input problems (CLI exit code 2).
struct BadParams : Error {
  using Error::Error;
};
struct OutOfDomain : Error {
  using Error::Error;
};
struct DerivUnavailable : Error {
  using Error::Error;
};
struct PresetUnavailable : Error {
  using Error::Error;
};

// Hypothesis gates (CLI exit code 3).
struct GateFailed : Error {
  using Error::Error;
};

// Numerical failures (CLI exit code 4).
struct RangeError : Error {
  using Error::Error;
};
struct ToleranceNotMet : Error {
  using Error::Error;
};
struct WrongHalfPlane : Error {
  using Error::Error;
};
struct WrongRegion : Error {
  using Error::Error;
};
struct ZeroDenominator : Error {
  using Error::Error;
};
struct FitDisagreement : Error {
  using Error::Error;
};
struct SingularConstraintSystem : Error {
  using Error::Error;
};
struct TooCloseToContour : Error {
  using Error::Error;
};
struct IllConditioned : Error {
  using Error::Error;
};
struct MomentDivergence : Error {
  using Error::Error;
};

}  // namespace mkdvut
