#pragma once

#include "poexp/poexp_distribution.hpp"

namespace poexp {

/// Constant shock rate λ and affine hazards μ_n = μ + nν.
struct LinearCaseParams {
  LinearCaseParams(double lambda, double mu, double nu);

  double lambda;
  double mu;
  double nu;

  /// The same law as a general PoExp(λ⃗, μ⃗).
  [[nodiscard]] PoExpParams to_poexp() const;
};

/// F̄(t) = exp(λ(1 - e^{-νt})/ν - (λ+μ)t)
[[nodiscard]] double survivor_linear(const LinearCaseParams& p, double t);

/// f(t) = (μ + λ(1 - e^{-νt})) F̄(t)
[[nodiscard]] double density_linear(const LinearCaseParams& p, double t);

/// Ψ(z) = E e^{-zT} = 1 - z e^{β} Σ_n (-β)^n / (n! (λ+μ+z+nν)), β = λ/ν.
[[nodiscard]] double mgf_linear(const LinearCaseParams& p, double z);

/// Ψ(z) = 1 - (z/ν) e^{β} β^{-b} γ(b, β) with b = (λ+μ+z)/ν.
[[nodiscard]] double mgf_linear_gamma(const LinearCaseParams& p, double z);

/// E T^m = e^{β} m! Σ_n (-β)^n / (n! (λ+μ+nν)^m).
[[nodiscard]] double moment_linear(const LinearCaseParams& p, unsigned m);

/// E T = (e^{β}/ν) β^{-(λ+μ)/ν} γ((λ+μ)/ν, β).
[[nodiscard]] double mean_linear_gamma(const LinearCaseParams& p);

/// Location of the density maximum: 0 when λν <= μ², otherwise
/// (1/ν) ln[(λ/(λ+μ)) (1 + ν/(2(λ+μ)) + sqrt((ν/(λ+μ))(1 + ν/(4(λ+μ)))))].
[[nodiscard]] double density_mode(const LinearCaseParams& p);

}  // namespace poexp
