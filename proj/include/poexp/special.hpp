#pragma once

namespace poexp {

/// γ(s, x) = ∫_0^x u^{s-1} e^{-u} du for s > 0, x >= 0.
///
/// Power series below x = s + 1, Lentz continued fraction for Γ(s, x) above.
[[nodiscard]] double lower_incomplete_gamma(double s, double x);

/// P(s, x) = γ(s, x) / Γ(s).
[[nodiscard]] double regularized_lower_gamma(double s, double x);

}  // namespace poexp
