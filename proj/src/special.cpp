#include "poexp/special.hpp"

#include <cmath>
#include <limits>

#include "poexp/errors.hpp"

namespace poexp {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxIter = 100000;

// P(s, x) by Σ x^n / (s (s+1) ... (s+n)), scaled by x^s e^{-x} / Γ(s).
double series_p(double s, double x) {
  double term = 1.0 / s;
  double sum = term;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= x / (s + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(s * std::log(x) - x - std::lgamma(s));
}

// Q(s, x) = Γ(s, x) / Γ(s) by the modified Lentz continued fraction.
double continued_fraction_q(double s, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(s * std::log(x) - x - std::lgamma(s)) * h;
}

void validate(double s, double x) {
  if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("incomplete gamma: s must be positive");
  if (!(x >= 0.0)) throw InvalidArgument("incomplete gamma: x must be nonnegative");
}

}  // namespace

double regularized_lower_gamma(double s, double x) {
  validate(s, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return x < s + 1.0 ? series_p(s, x) : 1.0 - continued_fraction_q(s, x);
}

double lower_incomplete_gamma(double s, double x) {
  validate(s, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return std::tgamma(s);
  if (x < s + 1.0) return series_p(s, x) * std::tgamma(s);
  return std::tgamma(s) * (1.0 - continued_fraction_q(s, x));
}

}  // namespace poexp
