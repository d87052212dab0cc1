#include "poexp/counting.hpp"

#include <algorithm>
#include <cmath>

#include "poexp/errors.hpp"
#include "poexp/kernel.hpp"

namespace poexp {

std::size_t CountingPath::count_at(double t) const {
  return static_cast<std::size_t>(std::upper_bound(event_times.begin(), event_times.end(), t) - event_times.begin());
}

double pmf_pi(const IntensitySequence& lambda, std::size_t n, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("pmf_pi: t must be nonnegative");
  if (t == 0.0) return n == 0 ? 1.0 : 0.0;
  if (lambda.is_constant()) {
    const double lt = lambda.term(0) * t;
    return std::exp(static_cast<double>(n) * std::log(lt) - lt - std::lgamma(static_cast<double>(n) + 1.0));
  }
  const auto nodes = lambda.terms(n + 1);
  const double a = a_n(nodes, t);
  if (a <= 0.0) return 0.0;
  const long double log_p = capital_lambda(lambda, n).log_magnitude() + std::log(static_cast<long double>(a));
  return std::min(1.0, static_cast<double>(std::exp(log_p)));
}

PmfTable pmf_table(const IntensitySequence& lambda, double t, double tail_tol, std::size_t max_k) {
  if (!(t >= 0.0)) throw InvalidArgument("pmf_table: t must be nonnegative");
  // Uniformization costs about K·max(λ)·t; explosive rates never shrink the tail, so doubling
  // also stops once the next table would exceed this budget.
  constexpr double kWorkBudget = 2e8;
  for (std::size_t K = 32;; K *= 2) {
    K = std::min(K, max_k);
    auto rates = lambda.terms(K + 1);
    auto weights = rates;
    KernelPropagator prop(std::move(rates), std::move(weights));
    prop.advance(t);
    const std::size_t next = std::min(2 * K, max_k);
    const auto next_rates = lambda.terms(next + 1);
    const double next_work =
        static_cast<double>(next) * *std::max_element(next_rates.begin(), next_rates.end()) * t;
    if (prop.sink() <= tail_tol || K == max_k || next_work > kWorkBudget) {
      const auto s = prop.state();
      return {std::vector<double>(s.begin(), s.end()), prop.sink()};
    }
  }
}

CountingPath sample_counting_path(const IntensitySequence& lambda, double horizon, RandomStream& rng,
                                  std::size_t cap) {
  if (!(horizon > 0.0)) throw InvalidArgument("sample_counting_path: horizon must be positive");
  CountingPath path;
  path.horizon = horizon;
  double t = 0.0;
  for (std::size_t n = 0;; ++n) {
    t += rng.exponential(lambda.term(n));
    if (t > horizon) break;
    if (path.event_times.size() >= cap) {
      path.truncated = true;
      break;
    }
    path.event_times.push_back(t);
  }
  return path;
}

}  // namespace poexp
