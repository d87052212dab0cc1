#include "poexp/signed_log.hpp"

#include <stdexcept>
#include <utility>

#include "poexp/errors.hpp"

namespace poexp {

SignedLogValue SignedLogValue::from(double v) {
  if (std::isnan(v)) throw InvalidArgument("SignedLogValue from NaN");
  if (v == 0.0) return {};
  return from_log(std::log(std::abs(static_cast<long double>(v))), v > 0 ? 1 : -1);
}

SignedLogValue SignedLogValue::from_log(long double log_magnitude, int sign) {
  SignedLogValue r;
  if (sign == 0 || log_magnitude == -INFINITY) return r;
  r.sign_ = sign > 0 ? 1 : -1;
  r.log_mag_ = log_magnitude;
  return r;
}

double SignedLogValue::value() const { return static_cast<double>(value_ld()); }

long double SignedLogValue::value_ld() const {
  if (sign_ == 0) return 0.0L;
  return sign_ * std::exp(log_mag_);
}

SignedLogValue SignedLogValue::reciprocal() const {
  if (sign_ == 0) throw InvalidArgument("reciprocal of zero");
  return from_log(-log_mag_, sign_);
}

SignedLogValue& SignedLogValue::operator*=(const SignedLogValue& o) {
  if (sign_ == 0 || o.sign_ == 0) {
    *this = {};
    return *this;
  }
  sign_ *= o.sign_;
  log_mag_ += o.log_mag_;
  return *this;
}

SignedLogValue& SignedLogValue::operator/=(const SignedLogValue& o) { return *this *= o.reciprocal(); }

SignedLogValue operator+(const SignedLogValue& a, const SignedLogValue& b) {
  if (a.sign_ == 0) return b;
  if (b.sign_ == 0) return a;
  const SignedLogValue& big = a.log_mag_ >= b.log_mag_ ? a : b;
  const SignedLogValue& small = a.log_mag_ >= b.log_mag_ ? b : a;
  const long double r = std::exp(small.log_mag_ - big.log_mag_);
  if (big.sign_ == small.sign_) return SignedLogValue::from_log(big.log_mag_ + std::log1p(r), big.sign_);
  if (r == 1.0L) return {};
  return SignedLogValue::from_log(big.log_mag_ + std::log1p(-r), big.sign_);
}

}  // namespace poexp
