#include "poexp/poexp_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "poexp/errors.hpp"
#include "poexp/kernel.hpp"

namespace poexp {

namespace {

constexpr std::size_t kMaxStates = 4096;
constexpr double kTailTol = 1e-14;

struct MixtureRun {
  std::vector<double> mass;      // Σ_n u_n(t)
  std::vector<double> weighted;  // Σ_n coef_n u_n(t)
};

// u_n(t) = Λ_n a_n(t; rates) on an increasing time grid, with the number of states doubled until
// the mass beyond the last state is negligible at the final time.
MixtureRun run_mixture(const IntensitySequence& lambda, const Sequence& rates, const Sequence* coef,
                       const std::vector<double>& times) {
  for (std::size_t K = 32;; K = std::min(2 * K, kMaxStates)) {
    auto x = rates.terms(K + 1);
    auto w = lambda.terms(K + 1);
    KernelPropagator prop(std::move(x), std::move(w));
    MixtureRun run;
    double t_prev = 0.0;
    for (double t : times) {
      prop.advance(t - t_prev);
      t_prev = t;
      CompensatedSum m, c;
      const auto u = prop.state();
      for (std::size_t n = 0; n <= K; ++n) {
        m.add(u[n]);
        if (coef) c.add(coef->term(n) * u[n]);
      }
      run.mass.push_back(static_cast<double>(m.value()));
      run.weighted.push_back(static_cast<double>(c.value()));
    }
    if (K == kMaxStates || times.empty()) return run;
    double coef_sup = 1.0;
    if (coef) {
      coef_sup = 0.0;
      for (std::size_t n = K + 1; n <= 4 * K; ++n) coef_sup = std::max(coef_sup, std::abs(coef->term(n)));
    }
    const double tail = prop.sink();
    const double ref_mass = run.mass.back();
    const double ref_weighted = coef ? std::abs(run.weighted.back()) : ref_mass;
    if (tail <= kTailTol * ref_mass && tail * coef_sup <= kTailTol * ref_weighted) return run;
  }
}

void check_sorted(const std::vector<double>& times) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || (i > 0 && times[i] < times[i - 1])) {
      throw InvalidArgument("time grid must be nonnegative and nondecreasing");
    }
  }
}

}  // namespace

PoExpParams::PoExpParams(IntensitySequence lambda_, IntensitySequence mu_)
    : lambda(std::move(lambda_)), mu(std::move(mu_)) {
  const auto nodes = total().terms(kEagerDistinct);
  check_distinct(nodes);
}

double joint_survivor(const PoExpParams& p, double t, std::size_t n) {
  if (!(t >= 0.0)) throw InvalidArgument("joint_survivor: t must be nonnegative");
  if (t == 0.0) return n == 0 ? 1.0 : 0.0;
  const auto nodes = p.total().terms(n + 1);
  const double a = a_n(nodes, t);
  if (a <= 0.0) return 0.0;
  return static_cast<double>(
      std::exp(capital_lambda(p.lambda, n).log_magnitude() + std::log(static_cast<long double>(a))));
}

double joint_density(const PoExpParams& p, double t, std::size_t n) { return p.mu.term(n) * joint_survivor(p, t, n); }

double mgf_xi(const PoExpParams& p, double z, double t) {
  if (!(z >= 0.0)) throw InvalidArgument("mgf_xi: z must be nonnegative");
  if (!(t >= 0.0)) throw InvalidArgument("mgf_xi: t must be nonnegative");
  if (z == 0.0 || t == 0.0) return 1.0;
  const Sequence rates = p.tilted(z);
  try {
    check_distinct(rates.terms(PoExpParams::kEagerDistinct));
  } catch (const DegenerateSpacing& e) {
    std::ostringstream os;
    os << "at z = " << z;
    throw DegenerateSpacing(e.first, e.second, rates.term(e.first), os.str());
  }
  return run_mixture(p.lambda, rates, nullptr, {t}).mass.front();
}

PoExpSample sample(const PoExpParams& p, RandomStream& rng, std::size_t cap) {
  PoExpSample s;
  double t = 0.0;
  for (std::size_t n = 0;; ++n) {
    const double shock = rng.exponential(p.lambda.term(n));
    const double fire = rng.exponential(p.mu.term(n));
    if (fire <= shock) {
      s.T = t + fire;
      s.shocks_before_T = n;
      return s;
    }
    t += shock;
    if (s.shock_times.size() >= cap) throw ExplosionCap(cap);
    s.shock_times.push_back(t);
  }
}

// ---------------------------------------------------------------------------
// PoExpDistribution

PoExpDistribution::PoExpDistribution(PoExpParams params, SeriesTolerance tol) : params_(std::move(params)), tol_(tol) {
  const Sequence nodes = params_.total();
  constexpr std::size_t kMaxCoefficients = 2000;
  ConvergenceMonitor outer(tol_);
  std::ostringstream why;
  try {
    for (std::size_t k = 0; k < kMaxCoefficients; ++k) {
      const KernelSeriesResult r = kappa_series(params_.lambda.sequence(), nodes, Sequence::constant(1.0), k, tol_);
      if (!r.converged()) {
        why << "b_" << k << (r.status == SeriesStatus::diverged ? " diverges" : " did not converge");
        break;
      }
      const double xk = nodes.term(k);
      b_.push_back(r.value);
      x_.push_back(xk);
      if (outer.push(r.value, std::abs(r.value) * std::max(1.0, xk)) != SeriesStatus::running) break;
    }
  } catch (const DegenerateSpacing& e) {
    why << e.what();
  }
  if (why.str().empty()) {
    if (outer.status() != SeriesStatus::converged) {
      why << "series over b_k does not converge";
    } else {
      // The identities F(0) = 1 and f(0) = μ_0 expose cancellation in the alternating sum.
      CompensatedSum s0, s1;
      for (std::size_t k = 0; k < b_.size(); ++k) {
        s0.add(b_[k]);
        s1.add(static_cast<long double>(x_[k]) * b_[k]);
      }
      const double mu0 = params_.mu.term(0);
      if (std::abs(static_cast<double>(s0.value()) - 1.0) > 1e-9 ||
          std::abs(static_cast<double>(s1.value()) - mu0) > 1e-9 * std::max(1.0, mu0)) {
        why << "series over b_k loses accuracy to cancellation";
      }
    }
  }
  failure_ = why.str();
  series_ok_ = failure_.empty();
  if (!series_ok_) {
    b_.clear();
    x_.clear();
  }
}

double PoExpDistribution::survivor_series(double t) const {
  if (!series_ok_) throw SeriesDiverged(failure_);
  if (!(t >= 0.0)) throw InvalidArgument("survivor: t must be nonnegative");
  CompensatedSum s;
  for (std::size_t k = 0; k < b_.size(); ++k) s.add(b_[k] * std::exp(-static_cast<long double>(x_[k]) * t));
  return std::clamp(static_cast<double>(s.value()), 0.0, 1.0);
}

double PoExpDistribution::density_series(double t) const {
  if (!series_ok_) throw SeriesDiverged(failure_);
  if (!(t >= 0.0)) throw InvalidArgument("density: t must be nonnegative");
  CompensatedSum s;
  for (std::size_t k = 0; k < b_.size(); ++k) {
    s.add(static_cast<long double>(x_[k]) * b_[k] * std::exp(-static_cast<long double>(x_[k]) * t));
  }
  return std::max(0.0, static_cast<double>(s.value()));
}

PoExpDistribution::Grid PoExpDistribution::fallback_grid(const std::vector<double>& times) const {
  check_sorted(times);
  const Sequence mu = params_.mu.sequence();
  MixtureRun run = run_mixture(params_.lambda, params_.total(), &mu, times);
  Grid g;
  g.method = Method::fallback;
  g.survivor = std::move(run.mass);
  g.density = std::move(run.weighted);
  for (double& v : g.survivor) v = std::clamp(v, 0.0, 1.0);
  return g;
}

double PoExpDistribution::survivor_fallback(double t) const { return fallback_grid({t}).survivor.front(); }

double PoExpDistribution::density_fallback(double t) const { return fallback_grid({t}).density.front(); }

Evaluation PoExpDistribution::survivor(double t) const {
  // At t = 0 the mixture is the single state n = 0, so F̄(0) = 1 and f(0) = μ_0 hold exactly.
  if (t == 0.0) return {1.0, Method::fallback};
  if (series_ok_) return {survivor_series(t), Method::series};
  return {survivor_fallback(t), Method::fallback};
}

Evaluation PoExpDistribution::density(double t) const {
  if (t == 0.0) return {params_.mu.term(0), Method::fallback};
  if (series_ok_) return {density_series(t), Method::series};
  return {density_fallback(t), Method::fallback};
}

PoExpDistribution::Grid PoExpDistribution::on_grid(const std::vector<double>& times) const {
  if (!series_ok_) return fallback_grid(times);
  check_sorted(times);
  Grid g;
  g.method = Method::series;
  for (double t : times) {
    g.survivor.push_back(t == 0.0 ? 1.0 : survivor_series(t));
    g.density.push_back(t == 0.0 ? params_.mu.term(0) : density_series(t));
  }
  return g;
}

MomentResult PoExpDistribution::moment(unsigned m) const {
  if (m == 0) throw InvalidArgument("moment order must be at least 1");
  std::vector<long double> h(m, 0.0L);
  h[0] = 1.0L;
  long double log_ratio = 0.0L;
  std::size_t n = 0;
  const IntensitySequence& lambda = params_.lambda;
  const IntensitySequence& mu = params_.mu;
  auto next = [&]() -> long double {
    const long double x = static_cast<long double>(lambda.term(n)) + mu.term(n);
    if (n > 0) log_ratio += std::log(static_cast<long double>(lambda.term(n - 1)));
    log_ratio -= std::log(x);
    for (unsigned j = 1; j < m; ++j) h[j] += h[j - 1] / x;
    ++n;
    return log_ratio + std::log(h[m - 1]);
  };
  // Λ_n/Π_n is the power-law part; h_{m-1} grows at most like (ln n)^{m-1} when it grows slowly.
  const PositiveSeriesResult r =
      sum_positive_series(next, 1e-13, 1u << 17, PositiveSeriesHint{[&] { return log_ratio; }, m - 1});
  const double factorial = std::tgamma(static_cast<double>(m) + 1.0);

  MomentResult out;
  out.infinite = r.infinite;
  out.value = r.infinite ? INFINITY : factorial * r.value;
  out.error_estimate = r.infinite ? 0.0 : factorial * r.error_estimate;
  if (series_ok_) {
    CompensatedSum s;
    for (std::size_t k = 0; k < b_.size(); ++k) s.add(b_[k] / std::pow(static_cast<long double>(x_[k]), m));
    out.series_value = factorial * static_cast<double>(s.value());
  }
  return out;
}

}  // namespace poexp
