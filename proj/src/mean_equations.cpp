#include "poexp/mean_equations.hpp"

#include <cmath>

#include "poexp/errors.hpp"
#include "poexp/series.hpp"

namespace poexp {

MeanGrid solve_mean_equations(const PatternParams& s0, const PatternParams& s1, double horizon, double step) {
  if (!(horizon > 0.0)) throw InvalidArgument("solve_mean_equations: horizon must be positive");
  if (step <= 0.0) step = 1e-2 * horizon;
  const auto n_steps = static_cast<std::size_t>(std::llround(horizon / step));
  if (n_steps == 0) throw InvalidArgument("solve_mean_equations: step exceeds horizon");
  const double h = horizon / static_cast<double>(n_steps);

  MeanGrid g;
  g.step = h;
  for (std::size_t i = 0; i <= n_steps; ++i) g.times.push_back(h * static_cast<double>(i));

  const PatternParams* pattern[2] = {&s0, &s1};
  std::vector<double> m[2], f[2];
  for (int s = 0; s < 2; ++s) {
    const MeanSource src(*pattern[s]);
    m[s] = src.grid(g.times, &g.source_method[s]);
    const PoExpDistribution law(pattern[s]->holding_law());
    auto grid = law.on_grid(g.times);
    f[s] = std::move(grid.density);
    g.density_method[s] = grid.method;
  }

  std::vector<double>& M0 = g.M0;
  std::vector<double>& M1 = g.M1;
  M0.assign(n_steps + 1, 0.0);
  M1.assign(n_steps + 1, 0.0);
  const double a = 0.5 * h * f[0][0];
  const double b = 0.5 * h * f[1][0];
  const double det = 1.0 - a * b;
  if (!(std::abs(det) > 1e-12)) throw InvalidArgument("solve_mean_equations: step too large for the kernel");
  for (std::size_t i = 1; i <= n_steps; ++i) {
    // Trapezoid over u_j = j h: the j = 0 term is implicit, the j = i term vanishes since 𝔐(0) = 0.
    CompensatedSum r0, r1;
    r0.add(m[0][i]);
    r1.add(m[1][i]);
    for (std::size_t j = 1; j < i; ++j) {
      r0.add(h * f[0][j] * M1[i - j]);
      r1.add(h * f[1][j] * M0[i - j]);
    }
    const double c0 = static_cast<double>(r0.value());
    const double c1 = static_cast<double>(r1.value());
    M0[i] = (c0 + a * c1) / det;
    M1[i] = (c1 + b * c0) / det;
  }
  return g;
}

}  // namespace poexp
