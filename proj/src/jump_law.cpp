#include "poexp/jump_law.hpp"

#include <algorithm>
#include <cmath>

#include "poexp/errors.hpp"
#include "poexp/series.hpp"

namespace poexp {

JumpLaw::JumpLaw(std::vector<double> values, std::vector<double> probs)
    : values_(std::move(values)), probs_(std::move(probs)) {
  CompensatedSum m;
  min_ = INFINITY;
  max_ = -INFINITY;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    m.add(static_cast<long double>(values_[i]) * probs_[i]);
    if (probs_[i] > 0.0) {
      min_ = std::min(min_, values_[i]);
      max_ = std::max(max_, values_[i]);
    }
  }
  mean_ = static_cast<double>(m.value());
}

JumpLaw JumpLaw::deterministic(double value) {
  if (!std::isfinite(value)) throw InvalidArgument("jump value must be finite");
  return JumpLaw({value}, {1.0});
}

JumpLaw JumpLaw::discrete(std::vector<double> values, std::vector<double> probs) {
  if (values.empty() || values.size() != probs.size()) {
    throw InvalidArgument("discrete jump law needs matching nonempty values and probs");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw InvalidArgument("jump value must be finite");
    if (!(probs[i] >= 0.0)) throw InvalidArgument("jump probabilities must be nonnegative");
    total += probs[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("jump probabilities must sum to 1");
  for (double& p : probs) p /= total;
  if (values.size() == 1) return deterministic(values[0]);
  return JumpLaw(std::move(values), std::move(probs));
}

double JumpLaw::sample(RandomStream& rng) const {
  if (values_.size() == 1) return values_[0];
  return values_[rng.discrete(probs_)];
}

JumpLawSequence::JumpLawSequence(std::vector<JumpLaw> prefix, std::vector<JumpLaw> periodic_tail)
    : prefix_(std::move(prefix)), tail_(std::move(periodic_tail)) {
  if (tail_.empty()) throw InvalidArgument("jump law sequence needs a nonempty tail");
}

Sequence JumpLawSequence::means() const {
  std::vector<double> p;
  for (const auto& l : prefix_) p.push_back(l.mean());
  std::vector<double> t;
  for (const auto& l : tail_) t.push_back(l.mean());
  return Sequence(std::move(p), TailRule::periodic(std::move(t)));
}

}  // namespace poexp
