#pragma once

#include <vector>

#include "poexp/poexp_distribution.hpp"
#include "poexp/telegraph.hpp"

namespace poexp {

/// 𝔐_i(t) = E{X(t) | ε(0) = i} on a uniform grid.
struct MeanGrid {
  double step = 0.0;
  std::vector<double> times;
  std::vector<double> M0;
  std::vector<double> M1;
  /// How the source terms and the kernels were evaluated, per state.
  Method source_method[2] = {Method::series, Method::series};
  Method density_method[2] = {Method::series, Method::series};
};

/// Solve the coupled renewal equations
///
///   𝔐_0(t) = 𝔪(t|σ0) + ∫_0^t f^{(0)}(u) 𝔐_1(t-u) du,
///   𝔐_1(t) = 𝔪(t|σ1) + ∫_0^t f^{(1)}(u) 𝔐_0(t-u) du,
///
/// f^{(i)} the holding-time density of pattern i, by trapezoidal time stepping (second order).
/// Each step solves a 2x2 system for the implicit endpoint terms. step <= 0 selects horizon/100.
[[nodiscard]] MeanGrid solve_mean_equations(const PatternParams& s0, const PatternParams& s1, double horizon,
                                            double step = 0.0);

}  // namespace poexp
