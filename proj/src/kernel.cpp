#include "poexp/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "poexp/errors.hpp"

namespace poexp {

namespace {

bool coincide(double a, double b) {
  return std::abs(a - b) <= kDistinctTolerance * std::max(std::abs(a), std::abs(b));
}

}  // namespace

SignedLogValue capital_lambda(const IntensitySequence& seq, std::size_t n) {
  long double acc = 0.0L;
  for (std::size_t k = 0; k < n; ++k) acc += std::log(static_cast<long double>(seq.term(k)));
  return SignedLogValue::from_log(acc);
}

SignedLogValue capital_pi(const IntensitySequence& lambda, const IntensitySequence& mu, std::size_t n) {
  long double acc = 0.0L;
  for (std::size_t k = 0; k <= n; ++k) {
    acc += std::log(static_cast<long double>(lambda.term(k)) + static_cast<long double>(mu.term(k)));
  }
  return SignedLogValue::from_log(acc);
}

void check_distinct(std::span<const double> nodes) {
  std::vector<std::size_t> order(nodes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return nodes[a] < nodes[b]; });
  // Coincidence is local in sorted order; report the pair with the smallest indices.
  std::optional<std::pair<std::size_t, std::size_t>> worst;
  for (std::size_t i = 1; i < order.size(); ++i) {
    const std::size_t a = order[i - 1];
    const std::size_t b = order[i];
    if (!coincide(nodes[a], nodes[b])) continue;
    const std::pair<std::size_t, std::size_t> pair{std::min(a, b), std::max(a, b)};
    if (!worst || pair < *worst) worst = pair;
  }
  if (worst) throw DegenerateSpacing(worst->first, worst->second, nodes[worst->first]);
}

SignedLogValue kappa(std::span<const double> nodes, std::size_t k) {
  if (k >= nodes.size()) throw InvalidArgument("kappa: k exceeds n");
  long double log_mag = 0.0L;
  int sign = 1;
  const double xk = nodes[k];
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    if (j == k) continue;
    if (coincide(nodes[j], xk)) throw DegenerateSpacing(std::min(j, k), std::max(j, k), xk);
    const long double d = static_cast<long double>(nodes[j]) - xk;
    log_mag -= std::log(std::fabs(d));
    if (d < 0) sign = -sign;
  }
  return SignedLogValue::from_log(log_mag, sign);
}

SignedLogValue kappa(const IntensitySequence& seq, std::size_t n, std::size_t k) {
  if (k > n) throw InvalidArgument("kappa: k exceeds n");
  const auto nodes = seq.terms(n + 1);
  return kappa(nodes, k);
}

double a_n(std::span<const double> nodes, double t) {
  if (nodes.empty()) throw InvalidArgument("a_n: empty node list");
  if (!(t >= 0.0)) throw InvalidArgument("a_n: t must be nonnegative");
  const std::size_t n = nodes.size() - 1;
  check_distinct(nodes);
  if (n == 0) return std::exp(-nodes[0] * t);
  if (t == 0.0) return 0.0;

  CompensatedSum sum;
  long double abs_sum = 0.0L;
  for (std::size_t k = 0; k <= n; ++k) {
    const SignedLogValue kap = kappa(nodes, k);
    const long double mag = std::exp(kap.log_magnitude() - static_cast<long double>(nodes[k]) * t);
    sum.add(kap.sign() * mag);
    abs_sum += mag;
  }
  const long double direct = sum.value();
  if (direct > 0.0L && abs_sum <= 1e6L * direct) return static_cast<double>(direct);

  std::vector<double> rates(nodes.begin(), nodes.end());
  std::vector<double> weights(n + 1, 1.0);
  weights[n] = 0.0;
  KernelPropagator prop(std::move(rates), std::move(weights));
  prop.set_full_reach(true);
  prop.advance(t);
  return prop.state()[n];
}

double a_n(const IntensitySequence& seq, std::size_t n, double t) {
  const auto nodes = seq.terms(n + 1);
  return a_n(nodes, t);
}

KernelSeriesResult kappa_series(const Sequence& weights, const Sequence& nodes, const Sequence& g, std::size_t k,
                                SeriesTolerance tol) {
  const double xk = nodes.term(k);
  long double log_kappa = 0.0L;
  long double log_w = 0.0L;
  int sign = 1;
  for (std::size_t j = 0; j < k; ++j) {
    const double xj = nodes.term(j);
    if (coincide(xj, xk)) throw DegenerateSpacing(j, k, xk);
    const long double d = static_cast<long double>(xj) - xk;
    log_kappa -= std::log(std::fabs(d));
    if (d < 0) sign = -sign;
    log_w += std::log(static_cast<long double>(weights.term(j)));
  }

  // Envelope scale for g: running max over a look-ahead window, so isolated zeros of g
  // cannot fake convergence.
  constexpr std::size_t kLookAhead = 64;
  long double g_max = 0.0L;
  std::size_t g_seen = k;
  auto extend_g = [&](std::size_t upto) {
    for (; g_seen <= upto; ++g_seen) g_max = std::max(g_max, static_cast<long double>(std::abs(g.term(g_seen))));
  };

  ConvergenceMonitor monitor(tol);
  KernelSeriesResult out;
  for (std::size_t n = k;; ++n) {
    if (n > k) {
      const double xn = nodes.term(n);
      if (coincide(xn, xk)) throw DegenerateSpacing(k, n, xk);
      const long double d = static_cast<long double>(xn) - xk;
      log_kappa -= std::log(std::fabs(d));
      if (d < 0) sign = -sign;
      log_w += std::log(static_cast<long double>(weights.term(n - 1)));
    }
    extend_g(n + kLookAhead);
    const long double mag = std::exp(log_w + log_kappa);
    const long double value = sign * mag * static_cast<long double>(g.term(n));
    const SeriesStatus s = monitor.push(value, mag * g_max);
    if (s != SeriesStatus::running) {
      out.status = s;
      break;
    }
  }
  out.value = static_cast<double>(monitor.sum());
  out.terms = monitor.terms();
  return out;
}

KernelSeriesResult b_k(const IntensitySequence& lambda, const IntensitySequence& mu, double z, std::size_t k,
                       SeriesTolerance tol) {
  if (!(z >= 0.0)) throw InvalidArgument("b_k: z must be nonnegative");
  const Sequence nodes = lambda.sequence() + z * mu.sequence();
  return kappa_series(lambda.sequence(), nodes, Sequence::constant(1.0), k, tol);
}

double check_vandermonde(std::span<const double> nodes) {
  if (nodes.size() < 2) throw InvalidArgument("check_vandermonde needs n >= 1");
  const std::size_t n = nodes.size() - 1;
  std::vector<long double> kap(n + 1);
  for (std::size_t k = 0; k <= n; ++k) kap[k] = kappa(nodes, k).value_ld();
  double worst = 0.0;
  for (std::size_t m = 0; m <= n; ++m) {
    CompensatedSum s;
    for (std::size_t k = 0; k <= n; ++k) s.add(kap[k] * std::pow(static_cast<long double>(nodes[k]), m));
    const long double expected = m == n ? (n % 2 == 0 ? 1.0L : -1.0L) : 0.0L;
    worst = std::max(worst, static_cast<double>(std::fabs(s.value() - expected)));
  }
  return worst;
}

double check_vandermonde(const IntensitySequence& seq, std::size_t n) {
  const auto nodes = seq.terms(n + 1);
  return check_vandermonde(nodes);
}

// ---------------------------------------------------------------------------
// KernelPropagator

KernelPropagator::KernelPropagator(std::vector<double> rates, std::vector<double> weights, bool with_integrals)
    : x_(std::move(rates)), w_(std::move(weights)), with_integrals_(with_integrals) {
  if (x_.empty() || w_.size() != x_.size()) throw InvalidArgument("propagator: need K+1 rates and K+1 weights");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!(x_[i] >= 0.0) || !(w_[i] >= 0.0) || !std::isfinite(x_[i]) || !std::isfinite(w_[i])) {
      throw InvalidArgument("propagator: rates and weights must be finite and nonnegative");
    }
  }
  q_ = *std::max_element(x_.begin(), x_.end());
  if (q_ == 0.0) q_ = 1.0;
  u_.assign(x_.size(), 0.0);
  u_[0] = 1.0;
  if (with_integrals_) v_.assign(x_.size(), 0.0);
}

void KernelPropagator::advance(double dt) {
  if (!(dt >= 0.0)) throw InvalidArgument("propagator: negative time step");
  if (dt == 0.0) return;
  // Poisson weights e^{-qτ}(qτ)^j/j! stay far from underflow for qτ <= 30.
  constexpr double kMaxChunk = 30.0;
  const auto chunks = static_cast<std::size_t>(std::max(1.0, std::ceil(q_ * dt / kMaxChunk)));
  const double tau = dt / static_cast<double>(chunks);
  for (std::size_t c = 0; c < chunks; ++c) step_chunk(tau);
  time_ += dt;
}

void KernelPropagator::step_chunk(double tau) {
  const std::size_t K = x_.size() - 1;
  const double lam = q_ * tau;
  const double inv_q = 1.0 / q_;

  std::vector<double> yu = u_;
  std::vector<double> yv = v_;
  double ys = sink_, ysi = sink_int_;

  long double pois = std::exp(-static_cast<long double>(lam));
  long double cum = pois;
  std::vector<double> au(K + 1), av(with_integrals_ ? K + 1 : 0);
  for (std::size_t n = 0; n <= K; ++n) au[n] = static_cast<double>(pois * yu[n]);
  for (std::size_t n = 0; n < av.size(); ++n) av[n] = static_cast<double>(pois * yv[n]);
  long double as = pois * ys, asi = pois * ysi;

  std::size_t frontier = 0;
  for (std::size_t n = 0; n <= K; ++n) {
    if (yu[n] != 0.0) frontier = n;
  }

  const auto j_cap = static_cast<std::size_t>(lam + 50.0 * std::sqrt(lam) + 100.0) + (full_reach_ ? 4 * (K + 1) : 0);
  for (std::size_t j = 1; j <= j_cap; ++j) {
    // y <- P y with P = I + M/q
    if (with_integrals_) {
      for (std::size_t n = 0; n <= K; ++n) yv[n] += yu[n] * inv_q;
    }
    ysi += ys * inv_q;
    ys += w_[K] * yu[K] * inv_q;
    for (std::size_t n = K; n >= 1; --n) yu[n] = (1.0 - x_[n] * inv_q) * yu[n] + w_[n - 1] * inv_q * yu[n - 1];
    yu[0] *= 1.0 - x_[0] * inv_q;
    if (frontier < K && yu[frontier + 1] != 0.0) ++frontier;

    pois *= lam / static_cast<long double>(j);
    cum += pois;
    bool negligible = true;
    for (std::size_t n = 0; n <= K; ++n) {
      const long double c = pois * yu[n];
      if (full_reach_ && c > 1e-18L * au[n]) negligible = false;
      au[n] += static_cast<double>(c);
    }
    for (std::size_t n = 0; n < av.size(); ++n) av[n] += static_cast<double>(pois * yv[n]);
    as += pois * ys;
    asi += pois * ysi;

    if (static_cast<double>(j) + 1.0 <= lam) continue;
    const long double r = lam / static_cast<long double>(j + 1);
    const bool poisson_done = pois * r / (1.0L - r) <= 1e-18L * cum;
    if (poisson_done && (!full_reach_ || (frontier == K && negligible))) break;
  }
  u_ = std::move(au);
  v_ = std::move(av);
  sink_ = static_cast<double>(as);
  sink_int_ = static_cast<double>(asi);
}

}  // namespace poexp
