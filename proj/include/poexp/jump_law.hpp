#pragma once

#include <cstddef>
#include <vector>

#include "poexp/random.hpp"
#include "poexp/sequence.hpp"

namespace poexp {

/// Law of one jump amplitude: a point mass or a finite discrete distribution.
class JumpLaw {
 public:
  static JumpLaw deterministic(double value);
  /// Probabilities must be nonnegative and sum to 1 within 1e-12; they are renormalized.
  static JumpLaw discrete(std::vector<double> values, std::vector<double> probs);

  [[nodiscard]] double mean() const { return mean_; }
  /// Smallest and largest atoms carrying positive probability.
  [[nodiscard]] double support_min() const { return min_; }
  [[nodiscard]] double support_max() const { return max_; }
  [[nodiscard]] bool is_deterministic() const { return values_.size() == 1; }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }
  [[nodiscard]] const std::vector<double>& probs() const { return probs_; }

  /// Point masses consume no random numbers.
  double sample(RandomStream& rng) const;

 private:
  JumpLaw(std::vector<double> values, std::vector<double> probs);

  std::vector<double> values_;
  std::vector<double> probs_;
  double mean_ = 0.0, min_ = 0.0, max_ = 0.0;
};

/// Jump laws indexed by n >= 0: explicit prefix, then tail[n % tail.size()].
class JumpLawSequence {
 public:
  JumpLawSequence(std::vector<JumpLaw> prefix, std::vector<JumpLaw> periodic_tail);
  static JumpLawSequence constant(JumpLaw law) { return {{}, {std::move(law)}}; }
  static JumpLawSequence zero() { return constant(JumpLaw::deterministic(0.0)); }

  [[nodiscard]] const JumpLaw& at(std::size_t n) const {
    return n < prefix_.size() ? prefix_[n] : tail_[n % tail_.size()];
  }
  [[nodiscard]] const std::vector<JumpLaw>& prefix() const { return prefix_; }
  [[nodiscard]] const std::vector<JumpLaw>& tail() const { return tail_; }
  /// Sequence of means with the same prefix/tail structure.
  [[nodiscard]] Sequence means() const;

 private:
  std::vector<JumpLaw> prefix_;
  std::vector<JumpLaw> tail_;
};

}  // namespace poexp
