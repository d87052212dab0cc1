#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "poexp/random.hpp"
#include "poexp/sequence.hpp"
#include "poexp/telegraph.hpp"

namespace poexp {

/// Bond B(t) = exp ∫_0^t y_{ε(s)} ds and stock S(t) = S0 e^{𝕃(t)} Π (1 + jump) driven by X.
struct MarketScenario {
  /// Throws InvalidArgument unless every jump atom is > -1, y_i >= 0 and S0 > 0.
  MarketScenario(PatternParams s0, PatternParams s1, double y0, double y1, double S0);

  std::array<PatternParams, 2> sigma;
  std::array<double, 2> y;
  double S0;

  /// Pattern i with trend c(n) - y_i: the stock in units of the bond.
  [[nodiscard]] PatternParams discounted(int i) const;
};

struct MarketPath {
  ProcessPath path;
  std::array<double, 2> y{};
  double S0 = 1.0;

  [[nodiscard]] double log_bond_at(double t) const;
  [[nodiscard]] double bond_at(double t) const { return std::exp(log_bond_at(t)); }
  [[nodiscard]] double log_stock_at(double t) const;
  [[nodiscard]] double stock_at(double t) const { return std::exp(log_stock_at(t)); }
  /// S(t) / B(t)
  [[nodiscard]] double discounted_at(double t) const { return std::exp(log_stock_at(t) - log_bond_at(t)); }
};

[[nodiscard]] MarketPath simulate_market_path(const MarketScenario& m, int initial_state, double horizon,
                                              RandomStream& rng, std::size_t cap = kDefaultEventCap);

/// Stock recomputed from the same events with trends c(n) - y: the discounted price under zero rates.
[[nodiscard]] std::vector<double> discounted_price(const MarketPath& p, const std::vector<double>& times);

/// Esscher data for one state: r*, R* > -1 and the derived c* = -λr* - μR*, λ* = λ(1+r*),
/// μ* = μ(1+R*).
struct EsscherState {
  Sequence r_star;
  Sequence R_star;
  Sequence c_star;
  IntensitySequence lambda_star;
  IntensitySequence mu_star;
};

struct EsscherParams {
  std::array<EsscherState, 2> state;
};

/// Throws InvalidGirsanov if some r*(n) or R*(n) is <= -1.
[[nodiscard]] EsscherParams esscher_derive(const MarketScenario& m, const std::array<Sequence, 2>& r_star,
                                           const std::array<Sequence, 2>& R_star);

/// The scenario with λ, μ replaced by λ*, μ* (the law of X under the new measure).
[[nodiscard]] MarketScenario starred_scenario(const MarketScenario& m, const EsscherParams& e);

/// log Z(t): Z is the stochastic exponential of 𝕃* + 𝕁* with slopes c*, shock jumps r*(n) and
/// switch jumps R*(n), n the shocks earlier in the epoch.
[[nodiscard]] double log_radon_nikodym(const ProcessPath& path, const EsscherParams& e, double t);
[[nodiscard]] std::vector<double> radon_nikodym(const ProcessPath& path, const EsscherParams& e,
                                                const std::vector<double>& times);

struct ArbitrageViolation {
  int state = 0;
  std::size_t n = 0;
  /// "support-" (c < 0, both supports below 0) or "support+" (c > 0, both above 0).
  std::string kind;
  /// Found by sign analysis of the tail rules beyond the explicit range.
  bool in_tail = false;
};

struct ArbitrageReport {
  bool arbitrage_free = true;
  std::vector<ArbitrageViolation> violations;
};

/// Flags one-sided (state, n): discounted trend and both jump supports of the same strict sign.
[[nodiscard]] ArbitrageReport detect_arbitrage(const MarketScenario& m, std::size_t n_check = 1000);

/// R*(n) = -1 - (c̃(n) + λ_n(1 + r*(n)) r̄(n)) / (μ_n R̄(n)), c̃ = c - y, for a chosen r*.
/// Throws NoValidMeasure if some R*(n) <= -1 and DivisionByZero if R̄(n) = 0 while the rest of
/// the drift does not vanish. Where both vanish R*(n) = 0.
[[nodiscard]] EsscherParams construct_martingale_measure(const MarketScenario& m,
                                                         const std::array<Sequence, 2>& r_star_choice);

struct MeasureChangeRow {
  double t = 0.0;
  std::size_t n = 0;
  /// E_P[Z(t) 1{T1 > t, N(t) = n}]
  double reweighted = 0.0, reweighted_se = 0.0;
  /// P*{T1 > t, N(t) = n} from PoExp(λ*, μ*); NaN when λ*_n + μ*_n coincide.
  double analytic = 0.0;
  /// Frequency under direct simulation with λ*, μ*
  double direct = 0.0, direct_se = 0.0;
};

struct MeasureChangeTimeRow {
  double t = 0.0;
  double z_mean = 0.0, z_se = 0.0;
  /// Discounted stock under the new measure: direct simulation and reweighting.
  double discounted_direct = 0.0, discounted_direct_se = 0.0;
  double discounted_reweighted = 0.0, discounted_reweighted_se = 0.0;
};

struct MeasureChangeReport {
  std::vector<MeasureChangeRow> rows;
  std::vector<MeasureChangeTimeRow> times;
  /// Largest pairwise discrepancy among reweighted / analytic / direct, in standard errors.
  /// Pairs with an unavailable analytic value are skipped.
  double max_z = 0.0;
  /// Largest |E Z(t) - 1| in standard errors.
  double max_z_mean = 0.0;
};

[[nodiscard]] MeasureChangeReport verify_measure_change(const MarketScenario& m, const EsscherParams& e,
                                                        int initial_state, const std::vector<double>& t_grid,
                                                        std::size_t n_max, std::size_t n_paths, std::uint64_t seed,
                                                        std::size_t workers = default_workers());

}  // namespace poexp
