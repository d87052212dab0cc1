#pragma once

#include <cmath>

namespace poexp {

/// Real number stored as sign and natural log of its magnitude.
///
/// Products of many small or large factors (κ, Λ_n, Π_n) stay representable; the
/// log-magnitude is kept in long double so converting back loses nothing visible in double.
class SignedLogValue {
 public:
  SignedLogValue() = default;
  static SignedLogValue from(double v);
  static SignedLogValue from_log(long double log_magnitude, int sign = 1);
  static SignedLogValue one() { return from_log(0.0L, 1); }

  [[nodiscard]] int sign() const { return sign_; }
  /// -inf for zero.
  [[nodiscard]] long double log_magnitude() const { return log_mag_; }
  [[nodiscard]] double value() const;
  [[nodiscard]] long double value_ld() const;
  [[nodiscard]] bool is_zero() const { return sign_ == 0; }

  [[nodiscard]] SignedLogValue reciprocal() const;
  SignedLogValue operator-() const { return from_log(log_mag_, -sign_); }

  SignedLogValue& operator*=(const SignedLogValue& o);
  SignedLogValue& operator/=(const SignedLogValue& o);
  friend SignedLogValue operator*(SignedLogValue a, const SignedLogValue& b) { return a *= b; }
  friend SignedLogValue operator/(SignedLogValue a, const SignedLogValue& b) { return a /= b; }
  friend SignedLogValue operator+(const SignedLogValue& a, const SignedLogValue& b);

 private:
  int sign_ = 0;
  long double log_mag_ = -INFINITY;
};

}  // namespace poexp
