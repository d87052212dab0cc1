#include "poexp/linear_case.hpp"

#include <cmath>

#include "poexp/errors.hpp"
#include "poexp/series.hpp"
#include "poexp/special.hpp"

namespace poexp {

namespace {

// e^{β} Σ_n (-β)^n / (n! d_n^m) with d_n = a + nν; stops once terms are below double resolution.
double alternating_linear_sum(double beta, double a, double nu, unsigned m) {
  CompensatedSum s;
  long double coef = 1.0L;  // β^n / n!
  for (unsigned n = 0; n < 100000; ++n) {
    if (n > 0) coef *= beta / n;
    const long double d = static_cast<long double>(a) + static_cast<long double>(n) * nu;
    const long double t = coef / std::pow(d, static_cast<long double>(m));
    s.add(n % 2 == 0 ? t : -t);
    if (n > beta && t < 1e-20L * std::fabs(s.value())) break;
  }
  return static_cast<double>(std::exp(static_cast<long double>(beta)) * s.value());
}

}  // namespace

LinearCaseParams::LinearCaseParams(double lambda_, double mu_, double nu_) : lambda(lambda_), mu(mu_), nu(nu_) {
  if (!(lambda > 0.0) || !(mu > 0.0) || !(nu > 0.0) || !std::isfinite(lambda) || !std::isfinite(mu) ||
      !std::isfinite(nu)) {
    throw InvalidArgument("linear case needs positive finite λ, μ, ν");
  }
}

PoExpParams LinearCaseParams::to_poexp() const {
  return {IntensitySequence::constant(lambda), IntensitySequence::affine(mu, nu)};
}

double survivor_linear(const LinearCaseParams& p, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("survivor_linear: t must be nonnegative");
  return std::exp(p.lambda * -std::expm1(-p.nu * t) / p.nu - (p.lambda + p.mu) * t);
}

double density_linear(const LinearCaseParams& p, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("density_linear: t must be nonnegative");
  const double alpha = -std::expm1(-p.nu * t);
  return (p.mu + p.lambda * alpha) * std::exp(-(p.mu + p.lambda) * t + p.lambda * alpha / p.nu);
}

double mgf_linear(const LinearCaseParams& p, double z) {
  if (!(z >= 0.0)) throw InvalidArgument("mgf_linear: z must be nonnegative");
  if (z == 0.0) return 1.0;
  const double beta = p.lambda / p.nu;
  return 1.0 - z * alternating_linear_sum(beta, p.lambda + p.mu + z, p.nu, 1);
}

double mgf_linear_gamma(const LinearCaseParams& p, double z) {
  if (!(z >= 0.0)) throw InvalidArgument("mgf_linear_gamma: z must be nonnegative");
  if (z == 0.0) return 1.0;
  const double beta = p.lambda / p.nu;
  const double b = (p.lambda + p.mu + z) / p.nu;
  return 1.0 - z / p.nu * std::exp(beta - b * std::log(beta)) * lower_incomplete_gamma(b, beta);
}

double moment_linear(const LinearCaseParams& p, unsigned m) {
  if (m == 0) throw InvalidArgument("moment order must be at least 1");
  return std::tgamma(m + 1.0) * alternating_linear_sum(p.lambda / p.nu, p.lambda + p.mu, p.nu, m);
}

double mean_linear_gamma(const LinearCaseParams& p) {
  const double beta = p.lambda / p.nu;
  const double s = (p.lambda + p.mu) / p.nu;
  return std::exp(beta - s * std::log(beta)) / p.nu * lower_incomplete_gamma(s, beta);
}

double density_mode(const LinearCaseParams& p) {
  if (p.lambda * p.nu <= p.mu * p.mu) return 0.0;
  const double a = p.lambda + p.mu;
  const double r = p.nu / a;
  return std::log(p.lambda / a * (1.0 + r / 2.0 + std::sqrt(r * (1.0 + r / 4.0)))) / p.nu;
}

}  // namespace poexp
