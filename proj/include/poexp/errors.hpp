#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace poexp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two kernel nodes coincide within the relative spacing tolerance.
class DegenerateSpacing : public Error {
 public:
  DegenerateSpacing(std::size_t i, std::size_t j, double value, const std::string& context = {})
      : Error("degenerate spacing: nodes " + std::to_string(i) + " and " + std::to_string(j) +
              " coincide near " + std::to_string(value) + (context.empty() ? "" : " " + context)),
        first(i),
        second(j) {}

  std::size_t first;
  std::size_t second;
};

/// A kernel series failed its decay test; the caller should use the Σ_n representation.
class SeriesDiverged : public Error {
 public:
  using Error::Error;
};

/// A simulated path hit the per-path event cap.
class ExplosionCap : public Error {
 public:
  explicit ExplosionCap(std::size_t cap)
      : Error("event cap of " + std::to_string(cap) + " reached (explosive intensities?)"), cap(cap) {}

  std::size_t cap;
};

/// Esscher parameters r* or R* not strictly greater than -1.
class InvalidGirsanov : public Error {
 public:
  using Error::Error;
};

/// The constructed martingale measure would need R*(n) <= -1.
class NoValidMeasure : public Error {
 public:
  NoValidMeasure(int state, std::size_t n)
      : Error("no valid martingale measure: R*(" + std::to_string(n) + ") <= -1 in state " +
              std::to_string(state)),
        state(state),
        index(n) {}

  int state;
  std::size_t index;
};

/// Mean of R(n) vanishes while the remaining drift does not.
class DivisionByZero : public Error {
 public:
  DivisionByZero(int state, std::size_t n)
      : Error("mean R(" + std::to_string(n) + ") is zero in state " + std::to_string(state) +
              " but the drift does not cancel"),
        state(state),
        index(n) {}

  int state;
  std::size_t index;
};

}  // namespace poexp
