#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "poexp/counting.hpp"
#include "poexp/random.hpp"
#include "poexp/sequence.hpp"
#include "poexp/series.hpp"

namespace poexp {

/// Law PoExp(λ⃗, μ⃗): the hazard of T is μ_{N(t)} while shocks of N arrive at rates λ_n.
struct PoExpParams {
  /// Throws DegenerateSpacing if λ_n + μ_n coincide among the first kEagerDistinct indices;
  /// later indices are checked when a formula reaches them.
  PoExpParams(IntensitySequence lambda, IntensitySequence mu);

  static constexpr std::size_t kEagerDistinct = 64;

  IntensitySequence lambda;
  IntensitySequence mu;

  /// λ⃗ + zμ⃗
  [[nodiscard]] Sequence tilted(double z) const { return lambda.sequence() + z * mu.sequence(); }
  [[nodiscard]] Sequence total() const { return tilted(1.0); }
};

struct PoExpSample {
  double T = 0.0;
  /// N(T-)
  std::size_t shocks_before_T = 0;
  std::vector<double> shock_times;
};

/// P{T > t, N(t) = n} = Λ_n a_n(t; λ⃗+μ⃗).
[[nodiscard]] double joint_survivor(const PoExpParams& p, double t, std::size_t n);

/// P{T ∈ dt, N(t) = n}/dt = μ_n Λ_n a_n(t; λ⃗+μ⃗).
[[nodiscard]] double joint_density(const PoExpParams& p, double t, std::size_t n);

/// ψ(z, t) = E e^{-zξ(t)} = Σ_n Λ_n a_n(t; λ⃗+zμ⃗). Throws DegenerateSpacing (naming z) if the
/// tilted rates coincide.
[[nodiscard]] double mgf_xi(const PoExpParams& p, double z, double t);

/// Competing exponential clocks: in state n a shock comes at rate λ_n and T fires at rate μ_n.
[[nodiscard]] PoExpSample sample(const PoExpParams& p, RandomStream& rng, std::size_t cap = kDefaultEventCap);

enum class Method { series, fallback };

[[nodiscard]] inline const char* to_string(Method m) { return m == Method::series ? "series" : "fallback"; }

struct Evaluation {
  double value = 0.0;
  Method method = Method::series;
};

struct MomentResult {
  /// E T^m, +inf when it does not exist.
  double value = 0.0;
  bool infinite = false;
  /// Estimated absolute error of `value` (Richardson table spread or tail bound).
  double error_estimate = 0.0;
  /// m! Σ_k b_k x_k^{-m} when the b_k series converges.
  std::optional<double> series_value;
};

/// Survivor, density and moments of one PoExp law.
///
/// The coefficients b_k are computed once at construction. When any of them, or Σ_k b_k itself,
/// fails the decay test, the series representation is unavailable and every marginal falls back
/// to Σ_n Λ_n a_n evaluated by uniformization.
class PoExpDistribution {
 public:
  explicit PoExpDistribution(PoExpParams params, SeriesTolerance tol = {});

  [[nodiscard]] const PoExpParams& params() const { return params_; }
  [[nodiscard]] bool series_available() const { return series_ok_; }
  /// Why the series is unavailable (empty when it is available).
  [[nodiscard]] const std::string& series_failure() const { return failure_; }
  [[nodiscard]] const std::vector<double>& b() const { return b_; }

  [[nodiscard]] Evaluation survivor(double t) const;
  [[nodiscard]] Evaluation density(double t) const;

  /// Σ_k b_k e^{-x_k t}; throws SeriesDiverged when unavailable.
  [[nodiscard]] double survivor_series(double t) const;
  /// Σ_k x_k b_k e^{-x_k t}; throws SeriesDiverged when unavailable.
  [[nodiscard]] double density_series(double t) const;
  /// Σ_n Λ_n a_n(t; λ⃗+μ⃗)
  [[nodiscard]] double survivor_fallback(double t) const;
  /// Σ_n μ_n Λ_n a_n(t; λ⃗+μ⃗)
  [[nodiscard]] double density_fallback(double t) const;

  /// Survivor and density on an increasing grid, sharing one propagation.
  struct Grid {
    std::vector<double> survivor;
    std::vector<double> density;
    Method method = Method::series;
  };
  [[nodiscard]] Grid on_grid(const std::vector<double>& times) const;
  /// Fallback representation on a grid, whatever the series status.
  [[nodiscard]] Grid fallback_grid(const std::vector<double>& times) const;

  /// E T^m from the positive series m! Σ_n (Λ_n/Π_n) h_{m-1}(1/x_0, ..., 1/x_n).
  [[nodiscard]] MomentResult moment(unsigned m) const;

 private:
  PoExpParams params_;
  SeriesTolerance tol_;
  bool series_ok_ = false;
  std::string failure_;
  std::vector<double> b_;
  std::vector<double> x_;
};

}  // namespace poexp
