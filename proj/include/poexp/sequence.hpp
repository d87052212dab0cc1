#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace poexp {

/// Real polynomial; coefficient i multiplies x^i.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coefficients);

  static Polynomial constant(double value);
  /// The monomial x.
  static Polynomial identity();

  /// -1 for the zero polynomial.
  [[nodiscard]] int degree() const { return static_cast<int>(coef_.size()) - 1; }
  [[nodiscard]] bool is_zero() const { return coef_.empty(); }
  [[nodiscard]] double leading() const { return coef_.empty() ? 0.0 : coef_.back(); }
  [[nodiscard]] std::span<const double> coefficients() const { return coef_; }
  [[nodiscard]] double operator()(double x) const;

  /// Every real root lies in (-bound, bound) (Cauchy bound).
  [[nodiscard]] double root_bound() const;

  Polynomial operator-() const;
  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double s, const Polynomial& a);
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void trim();
  std::vector<double> coef_;
};

/// Ratio of two polynomials, denominator normalized to a unit leading coefficient.
class RationalFunction {
 public:
  RationalFunction() : num_(), den_(Polynomial::constant(1.0)) {}
  RationalFunction(Polynomial num, Polynomial den);
  explicit RationalFunction(Polynomial num) : RationalFunction(std::move(num), Polynomial::constant(1.0)) {}

  [[nodiscard]] const Polynomial& numerator() const { return num_; }
  [[nodiscard]] const Polynomial& denominator() const { return den_; }
  [[nodiscard]] double operator()(double x) const { return num_(x) / den_(x); }
  [[nodiscard]] bool is_zero() const { return num_.is_zero(); }
  /// deg(num) - deg(den); the growth exponent as x -> inf. Meaningless for zero.
  [[nodiscard]] int growth() const { return num_.degree() - den_.degree(); }
  /// Sign as x -> +inf (0 for the zero function).
  [[nodiscard]] int eventual_sign() const;
  /// For x > bound(), neither numerator nor denominator changes sign.
  [[nodiscard]] double bound() const;

  RationalFunction operator-() const { return {-num_, den_}; }
  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b);

 private:
  Polynomial num_;
  Polynomial den_;
};

/// Rule generating the terms of a sequence beyond its explicit prefix.
///
/// The term at index n is `by_residue[n % period](n + 1)`: a rational function of x = n + 1
/// chosen by the residue of n. Constant, affine, quadratic, reciprocal and periodic tails are all
/// special cases, and the family is closed under +, -, *, / so composite sequences such as λ+μ
/// or λ(1+r*) keep an analytic tail.
class TailRule {
 public:
  TailRule() : TailRule(RationalFunction(Polynomial::constant(0.0))) {}
  explicit TailRule(RationalFunction f) : by_residue_{std::move(f)} {}
  explicit TailRule(std::vector<RationalFunction> by_residue);

  static TailRule constant(double v);
  /// a + b·n
  static TailRule affine(double a, double b);
  /// a·(n+1)²
  static TailRule quadratic(double a);
  /// a/(n+1)
  static TailRule reciprocal(double a);
  /// values[n % values.size()]
  static TailRule periodic(std::vector<double> values);

  [[nodiscard]] double operator()(std::size_t n) const;
  [[nodiscard]] std::size_t period() const { return by_residue_.size(); }
  [[nodiscard]] const RationalFunction& residue(std::size_t r) const { return by_residue_[r]; }
  /// Same rule expanded to a multiple of its period.
  [[nodiscard]] TailRule with_period(std::size_t period) const;

  TailRule operator-() const;
  friend TailRule operator+(const TailRule& a, const TailRule& b);
  friend TailRule operator-(const TailRule& a, const TailRule& b);
  friend TailRule operator*(const TailRule& a, const TailRule& b);
  friend TailRule operator/(const TailRule& a, const TailRule& b);

 private:
  std::vector<RationalFunction> by_residue_;
};

/// Infinite real sequence: explicit prefix followed by an analytic tail rule.
class Sequence {
 public:
  Sequence() = default;
  Sequence(std::vector<double> prefix, TailRule tail);
  explicit Sequence(TailRule tail) : Sequence({}, std::move(tail)) {}

  static Sequence constant(double v) { return Sequence(TailRule::constant(v)); }

  [[nodiscard]] double term(std::size_t n) const { return n < prefix_.size() ? prefix_[n] : tail_(n); }
  [[nodiscard]] double operator()(std::size_t n) const { return term(n); }
  [[nodiscard]] std::span<const double> prefix() const { return prefix_; }
  [[nodiscard]] const TailRule& tail() const { return tail_; }
  /// Materialize terms 0..count-1.
  [[nodiscard]] std::vector<double> terms(std::size_t count) const;

  /// First index n >= from with term(n) <= 0, if any. Decided from the tail rule.
  [[nodiscard]] std::optional<std::size_t> first_nonpositive(std::size_t from = 0) const;

  Sequence operator-() const;
  friend Sequence operator+(const Sequence& a, const Sequence& b);
  friend Sequence operator-(const Sequence& a, const Sequence& b);
  friend Sequence operator*(const Sequence& a, const Sequence& b);
  friend Sequence operator/(const Sequence& a, const Sequence& b);
  friend Sequence operator*(double s, const Sequence& a);
  friend Sequence operator+(double s, const Sequence& a);

 private:
  std::vector<double> prefix_;
  TailRule tail_;
};

/// A strictly positive sequence of rates (λ⃗ or μ⃗), in units of 1/time.
class IntensitySequence {
 public:
  /// Throws InvalidArgument if any term (prefix or tail) is not strictly positive.
  explicit IntensitySequence(Sequence seq);
  IntensitySequence(std::vector<double> prefix, TailRule tail)
      : IntensitySequence(Sequence(std::move(prefix), std::move(tail))) {}

  static IntensitySequence constant(double v) { return IntensitySequence(Sequence::constant(v)); }
  static IntensitySequence affine(double a, double b) { return IntensitySequence({}, TailRule::affine(a, b)); }

  [[nodiscard]] double term(std::size_t n) const { return seq_.term(n); }
  [[nodiscard]] double operator()(std::size_t n) const { return seq_.term(n); }
  [[nodiscard]] const Sequence& sequence() const { return seq_; }
  [[nodiscard]] std::vector<double> terms(std::size_t count) const { return seq_.terms(count); }

  /// Σ 1/λ_n = ∞, decided from the tail: true iff some residue class grows at most linearly.
  [[nodiscard]] bool is_non_explosive() const;
  /// True when every term equals the first one (a homogeneous Poisson rate).
  [[nodiscard]] bool is_constant() const;

  friend IntensitySequence operator+(const IntensitySequence& a, const IntensitySequence& b) {
    return IntensitySequence(a.seq_ + b.seq_);
  }

 private:
  Sequence seq_;
};

/// Human-readable description of a tail rule, e.g. for diagnostics.
std::string describe(const TailRule& tail);

}  // namespace poexp
