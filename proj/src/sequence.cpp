#include "poexp/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "poexp/errors.hpp"

namespace poexp {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Sums whose magnitude is below this multiple of the operands' rounding level are treated as
// exact cancellations, so that e.g. (c + λr̄) - λr̄ reproduces the degree of c.
constexpr double kCancellation = 64.0 * kEps;

double cancel_add(double a, double b) {
  const double s = a + b;
  return std::abs(s) <= kCancellation * (std::abs(a) + std::abs(b)) ? 0.0 : s;
}

// Real roots of p when deg p <= 2; otherwise a Cauchy bound enclosing all of them.
struct RootInfo {
  bool exact = true;
  std::vector<double> roots;
  double bound = 0.0;
};

RootInfo roots_of(const Polynomial& p) {
  RootInfo info;
  const auto c = p.coefficients();
  switch (p.degree()) {
    case -1:
    case 0:
      break;
    case 1:
      info.roots.push_back(-c[0] / c[1]);
      break;
    case 2: {
      const double disc = c[1] * c[1] - 4.0 * c[2] * c[0];
      if (disc >= 0.0) {
        const double q = -0.5 * (c[1] + std::copysign(std::sqrt(disc), c[1]));
        info.roots.push_back(q / c[2]);
        if (q != 0.0) info.roots.push_back(c[0] / q);
      }
      break;
    }
    default:
      info.exact = false;
      break;
  }
  info.bound = info.exact
                   ? (info.roots.empty() ? 0.0 : *std::max_element(info.roots.begin(), info.roots.end()))
                   : p.root_bound();
  return info;
}

std::size_t lcm_period(std::size_t a, std::size_t b) { return std::lcm(a, b); }

}  // namespace

// ---------------------------------------------------------------------------
// Polynomial

Polynomial::Polynomial(std::vector<double> coefficients) : coef_(std::move(coefficients)) {
  for (double c : coef_) {
    if (!std::isfinite(c)) throw InvalidArgument("polynomial coefficient is not finite");
  }
  trim();
}

Polynomial Polynomial::constant(double value) { return Polynomial({value}); }

Polynomial Polynomial::identity() { return Polynomial({0.0, 1.0}); }

void Polynomial::trim() {
  while (!coef_.empty() && coef_.back() == 0.0) coef_.pop_back();
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coef_.rbegin(); it != coef_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double Polynomial::root_bound() const {
  if (degree() <= 0) return 0.0;
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < coef_.size(); ++i) m = std::max(m, std::abs(coef_[i] / coef_.back()));
  return 1.0 + m;
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (double& c : r.coef_) c = -c;
  return r;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<double> c(std::max(a.coef_.size(), b.coef_.size()), 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double x = i < a.coef_.size() ? a.coef_[i] : 0.0;
    const double y = i < b.coef_.size() ? b.coef_[i] : 0.0;
    c[i] = cancel_add(x, y);
  }
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<double> c(a.coef_.size() + b.coef_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coef_.size(); ++i) {
    for (std::size_t j = 0; j < b.coef_.size(); ++j) c[i + j] += a.coef_[i] * b.coef_[j];
  }
  return Polynomial(std::move(c));
}

Polynomial operator*(double s, const Polynomial& a) { return Polynomial::constant(s) * a; }

// ---------------------------------------------------------------------------
// RationalFunction

RationalFunction::RationalFunction(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw InvalidArgument("rational function with zero denominator");
  const double lead = den_.leading();
  if (lead != 1.0) {
    num_ = (1.0 / lead) * num_;
    den_ = (1.0 / lead) * den_;
  }
  if (num_.is_zero()) den_ = Polynomial::constant(1.0);
}

int RationalFunction::eventual_sign() const {
  if (num_.is_zero()) return 0;
  return num_.leading() > 0.0 ? 1 : -1;
}

double RationalFunction::bound() const { return std::max(roots_of(num_).bound, roots_of(den_).bound); }

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
  if (a.den_ == b.den_) return {a.num_ + b.num_, a.den_};
  return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
}

RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
  if (a.is_zero() || b.is_zero()) return RationalFunction();
  // Cancel a common factor when one side's numerator equals the other's denominator.
  if (a.num_ == b.den_) return {b.num_, a.den_};
  if (b.num_ == a.den_) return {a.num_, b.den_};
  return {a.num_ * b.num_, a.den_ * b.den_};
}

RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
  if (b.is_zero()) throw InvalidArgument("division by the zero function");
  return a * RationalFunction(b.den_, b.num_);
}

// ---------------------------------------------------------------------------
// TailRule

TailRule::TailRule(std::vector<RationalFunction> by_residue) : by_residue_(std::move(by_residue)) {
  if (by_residue_.empty()) throw InvalidArgument("tail rule needs at least one residue class");
}

TailRule TailRule::constant(double v) { return TailRule(RationalFunction(Polynomial::constant(v))); }

TailRule TailRule::affine(double a, double b) {
  // a + b·n = (a - b) + b·x with x = n + 1
  return TailRule(RationalFunction(Polynomial({a - b, b})));
}

TailRule TailRule::quadratic(double a) { return TailRule(RationalFunction(Polynomial({0.0, 0.0, a}))); }

TailRule TailRule::reciprocal(double a) {
  return TailRule(RationalFunction(Polynomial::constant(a), Polynomial::identity()));
}

TailRule TailRule::periodic(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("periodic tail needs at least one value");
  std::vector<RationalFunction> f;
  f.reserve(values.size());
  for (double v : values) f.emplace_back(Polynomial::constant(v));
  return TailRule(std::move(f));
}

double TailRule::operator()(std::size_t n) const {
  return by_residue_[n % by_residue_.size()](static_cast<double>(n) + 1.0);
}

TailRule TailRule::with_period(std::size_t period) const {
  if (period % by_residue_.size() != 0) throw InvalidArgument("period must be a multiple of the rule's period");
  std::vector<RationalFunction> f;
  f.reserve(period);
  for (std::size_t r = 0; r < period; ++r) f.push_back(by_residue_[r % by_residue_.size()]);
  return TailRule(std::move(f));
}

TailRule TailRule::operator-() const {
  std::vector<RationalFunction> f;
  for (const auto& g : by_residue_) f.push_back(-g);
  return TailRule(std::move(f));
}

namespace {

template <class Op>
TailRule combine(const TailRule& a, const TailRule& b, Op op) {
  const std::size_t p = lcm_period(a.period(), b.period());
  std::vector<RationalFunction> f;
  f.reserve(p);
  for (std::size_t r = 0; r < p; ++r) f.push_back(op(a.residue(r % a.period()), b.residue(r % b.period())));
  return TailRule(std::move(f));
}

}  // namespace

TailRule operator+(const TailRule& a, const TailRule& b) {
  return combine(a, b, [](const auto& x, const auto& y) { return x + y; });
}
TailRule operator-(const TailRule& a, const TailRule& b) {
  return combine(a, b, [](const auto& x, const auto& y) { return x - y; });
}
TailRule operator*(const TailRule& a, const TailRule& b) {
  return combine(a, b, [](const auto& x, const auto& y) { return x * y; });
}
TailRule operator/(const TailRule& a, const TailRule& b) {
  return combine(a, b, [](const auto& x, const auto& y) { return x / y; });
}

// ---------------------------------------------------------------------------
// Sequence

Sequence::Sequence(std::vector<double> prefix, TailRule tail) : prefix_(std::move(prefix)), tail_(std::move(tail)) {
  for (double v : prefix_) {
    if (!std::isfinite(v)) throw InvalidArgument("sequence prefix value is not finite");
  }
}

std::vector<double> Sequence::terms(std::size_t count) const {
  std::vector<double> out(count);
  for (std::size_t n = 0; n < count; ++n) out[n] = term(n);
  return out;
}

std::optional<std::size_t> Sequence::first_nonpositive(std::size_t from) const {
  for (std::size_t n = from; n < prefix_.size(); ++n) {
    if (!(prefix_[n] > 0.0)) return n;
  }
  const std::size_t start = std::max(from, prefix_.size());
  const std::size_t p = tail_.period();
  std::optional<std::size_t> best;
  auto consider = [&](std::size_t n) {
    if (!best || n < *best) best = n;
  };

  for (std::size_t r = 0; r < p; ++r) {
    const RationalFunction& f = tail_.residue(r);
    // first index >= lo in residue class r
    auto aligned = [&](double lo) -> std::size_t {
      const double base = std::max(lo, static_cast<double>(start));
      if (base > 1e15) return std::numeric_limits<std::size_t>::max();
      auto n = static_cast<std::size_t>(std::ceil(base));
      return n + (r + p - n % p) % p;
    };
    auto nonpositive_at = [&](std::size_t n) {
      const double x = static_cast<double>(n) + 1.0;
      const double d = f.denominator()(x);
      return d == 0.0 || !(f.numerator()(x) / d > 0.0);
    };

    const RootInfo rn = roots_of(f.numerator());
    const RootInfo rd = roots_of(f.denominator());
    if (rn.exact && rd.exact) {
      // Sign is constant between consecutive real roots: it suffices to test the first
      // aligned index and the first aligned indices at or past each root.
      std::vector<std::size_t> candidates{aligned(0.0)};
      for (const auto* info : {&rn, &rd}) {
        for (double root : info->roots) {
          const double n_root = root - 1.0;  // x = n + 1
          if (n_root < static_cast<double>(start)) continue;
          candidates.push_back(aligned(std::floor(n_root)));
          candidates.push_back(aligned(std::floor(n_root) + 1.0));
        }
      }
      std::sort(candidates.begin(), candidates.end());
      for (std::size_t n : candidates) {
        if (n == std::numeric_limits<std::size_t>::max()) continue;
        if (nonpositive_at(n)) {
          consider(n);
          break;
        }
      }
      continue;
    }

    // General case: scan up to the Cauchy bound, then the eventual sign decides.
    const double bound = f.bound();
    constexpr double kScanCap = 1e7;
    if (bound > kScanCap) throw InvalidArgument("cannot certify the sign of tail rule " + describe(tail_));
    std::size_t n = aligned(0.0);
    for (; static_cast<double>(n) + 1.0 <= bound + 1.0; n += p) {
      if (nonpositive_at(n)) {
        consider(n);
        break;
      }
    }
    if (f.eventual_sign() <= 0) consider(n);
  }
  return best;
}

Sequence Sequence::operator-() const { return -1.0 * *this; }

namespace {

template <class Op, class TailOp>
Sequence combine(const Sequence& a, const Sequence& b, Op op, TailOp tail_op) {
  const std::size_t len = std::max(a.prefix().size(), b.prefix().size());
  std::vector<double> prefix(len);
  for (std::size_t n = 0; n < len; ++n) prefix[n] = op(a.term(n), b.term(n));
  return Sequence(std::move(prefix), tail_op(a.tail(), b.tail()));
}

}  // namespace

Sequence operator+(const Sequence& a, const Sequence& b) {
  return combine(a, b, [](double x, double y) { return x + y; }, [](const auto& x, const auto& y) { return x + y; });
}
Sequence operator-(const Sequence& a, const Sequence& b) {
  return combine(a, b, [](double x, double y) { return x - y; }, [](const auto& x, const auto& y) { return x - y; });
}
Sequence operator*(const Sequence& a, const Sequence& b) {
  return combine(a, b, [](double x, double y) { return x * y; }, [](const auto& x, const auto& y) { return x * y; });
}
Sequence operator/(const Sequence& a, const Sequence& b) {
  return combine(a, b, [](double x, double y) { return x / y; }, [](const auto& x, const auto& y) { return x / y; });
}
Sequence operator*(double s, const Sequence& a) { return Sequence::constant(s) * a; }
Sequence operator+(double s, const Sequence& a) { return Sequence::constant(s) + a; }

// ---------------------------------------------------------------------------
// IntensitySequence

IntensitySequence::IntensitySequence(Sequence seq) : seq_(std::move(seq)) {
  if (auto bad = seq_.first_nonpositive()) {
    throw InvalidArgument("intensity sequence is not strictly positive at index " + std::to_string(*bad));
  }
}

bool IntensitySequence::is_non_explosive() const {
  const TailRule& tail = seq_.tail();
  for (std::size_t r = 0; r < tail.period(); ++r) {
    if (tail.residue(r).growth() <= 1) return true;
  }
  return false;
}

bool IntensitySequence::is_constant() const {
  const double v = seq_.term(0);
  for (double p : seq_.prefix()) {
    if (p != v) return false;
  }
  const TailRule& tail = seq_.tail();
  for (std::size_t r = 0; r < tail.period(); ++r) {
    const RationalFunction& f = tail.residue(r);
    if (f.growth() != 0 || f.numerator().degree() != 0 || f.numerator().leading() != v) return false;
  }
  return true;
}

std::string describe(const TailRule& tail) {
  std::ostringstream os;
  os.precision(6);
  for (std::size_t r = 0; r < tail.period(); ++r) {
    if (r) os << " | ";
    const auto& f = tail.residue(r);
    auto poly = [&](const Polynomial& p) {
      os << "(";
      const auto c = p.coefficients();
      if (c.empty()) os << "0";
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) os << " + ";
        os << c[i];
        if (i) os << "*x^" << i;
      }
      os << ")";
    };
    poly(f.numerator());
    if (f.denominator().degree() > 0) {
      os << "/";
      poly(f.denominator());
    }
  }
  return os.str();
}

}  // namespace poexp
