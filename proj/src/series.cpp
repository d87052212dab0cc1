#include "poexp/series.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace poexp {

void CompensatedSum::add(long double x) {
  const long double t = sum_ + x;
  if (std::fabs(sum_) >= std::fabs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

SeriesStatus ConvergenceMonitor::push(long double term, long double envelope) {
  if (status_ != SeriesStatus::running) return status_;
  envelope = std::max(std::fabs(envelope), std::fabs(term));
  sum_.add(term);
  ++count_;

  if (!recent_.empty() && envelope >= recent_.back()) {
    ++rising_;
  } else {
    rising_ = 0;
  }
  recent_.push_back(envelope);
  if (recent_.size() > 8) recent_.pop_front();

  const long double threshold = tol_.relative * std::fabs(sum_.value());
  calm_ = envelope <= threshold ? calm_ + 1 : 0;

  long double q = 0.0L;
  bool contracting = recent_.size() >= 2;
  for (std::size_t i = 1; i < recent_.size() && contracting; ++i) {
    if (recent_[i - 1] == 0.0L) {
      if (recent_[i] != 0.0L) contracting = false;
      continue;
    }
    q = std::max(q, recent_[i] / recent_[i - 1]);
  }
  contracting = contracting && q < 1.0L;
  tail_ = contracting ? envelope * q / (1.0L - q) : INFINITY;

  if (calm_ >= tol_.calm_terms && tail_ <= threshold) {
    status_ = SeriesStatus::converged;
  } else if (count_ > tol_.divergence_start && rising_ + 1 >= tol_.divergence_window) {
    status_ = SeriesStatus::diverged;
  } else if (count_ >= tol_.max_terms) {
    status_ = SeriesStatus::exhausted;
  }
  return status_;
}

namespace {

// Geometric decay: contraction ratios bounded away from 1 and not drifting upward.
bool geometric_tail(const std::vector<long double>& log_terms, long double sum, double tol, long double& tail) {
  constexpr std::size_t kWindow = 16;
  const std::size_t n = log_terms.size();
  if (n < 2 * kWindow + 1) return false;
  long double recent = -INFINITY;
  long double earlier = -INFINITY;
  for (std::size_t i = n - kWindow; i < n; ++i) recent = std::max(recent, log_terms[i] - log_terms[i - 1]);
  for (std::size_t i = n - 2 * kWindow; i < n - kWindow; ++i) {
    earlier = std::max(earlier, log_terms[i] - log_terms[i - 1]);
  }
  if (recent > std::log(1.0L - 1e-3L) || recent > earlier + 1e-12L) return false;
  const long double q = std::exp(recent);
  // Terms come in blocks; bound the tail by the largest of the last window.
  long double last = -INFINITY;
  for (std::size_t i = n - kWindow; i < n; ++i) last = std::max(last, log_terms[i]);
  tail = std::exp(last) * q / (1.0L - q);
  return tail <= tol * sum;
}

}  // namespace

PositiveSeriesResult sum_positive_series(const std::function<long double()>& next_log_term, double relative_tol,
                                         std::size_t max_terms, const PositiveSeriesHint& hint) {
  PositiveSeriesResult out;
  CompensatedSum sum;
  std::vector<long double> log_terms;
  constexpr std::size_t kFirstCheckpoint = 1024;
  std::vector<long double> checkpoint_sum;
  std::vector<long double> checkpoint_log_term;
  std::vector<long double> checkpoint_log_power;
  long double log_power = 0.0L;

  for (std::size_t n = 0; n < max_terms; ++n) {
    const long double lt = next_log_term();
    if (hint.log_power_part) log_power = hint.log_power_part();
    if (lt == INFINITY || std::isnan(lt)) {
      out.infinite = true;
      out.value = INFINITY;
      out.terms = n + 1;
      return out;
    }
    log_terms.push_back(lt);
    sum.add(std::exp(lt));

    long double tail = 0.0L;
    if (lt == -INFINITY && n > 0 && log_terms[n - 1] == -INFINITY) {
      // All further factors vanish once a zero appears (products of rates).
      out.value = static_cast<double>(sum.value());
      out.terms = n + 1;
      return out;
    }
    if (n % 8 == 7 && geometric_tail(log_terms, sum.value(), relative_tol, tail)) {
      out.value = static_cast<double>(sum.value());
      out.terms = n + 1;
      out.error_estimate = static_cast<double>(tail);
      return out;
    }

    const std::size_t count = n + 1;
    if (count >= kFirstCheckpoint && (count & (count - 1)) == 0) {
      checkpoint_sum.push_back(sum.value());
      checkpoint_log_term.push_back(lt);
      checkpoint_log_power.push_back(log_power);
      const std::size_t j = checkpoint_sum.size();
      if (j < 3) continue;

      // Decay exponent from successive doublings, extrapolated against its O(1/N) bias.
      auto exponent = [&](const std::vector<long double>& logs) {
        const long double ln2 = std::log(2.0L);
        const long double last = (logs[j - 2] - logs[j - 1]) / ln2;
        const long double before = (logs[j - 3] - logs[j - 2]) / ln2;
        return 2.0L * last - before;
      };
      long double p_hat = exponent(checkpoint_log_term);
      unsigned multiplicity = 1;
      if (hint.log_power_part) {
        const long double p_power = exponent(checkpoint_log_power);
        // The remainder is slowly varying when it accounts for almost none of the decay.
        if (std::fabs(p_hat - p_power) < 0.1L) {
          p_hat = p_power;
          multiplicity = hint.log_order + 1;
        }
      }
      if (p_hat <= 1.0L + 1e-3L) {
        out.infinite = true;
        out.value = INFINITY;
        out.terms = count;
        return out;
      }

      // Richardson table over the checkpoint partial sums.
      std::vector<long double> row(checkpoint_sum.begin(), checkpoint_sum.end());
      long double prev_diag = row.back();
      long double diag = row.back();
      long double err = INFINITY;
      for (std::size_t level = 0; level + 1 < row.size(); ++level) {
        const long double f = std::pow(2.0L, p_hat - 1.0L + static_cast<long double>(level / multiplicity));
        std::vector<long double> next(row.size() - 1);
        for (std::size_t i = 0; i + 1 < row.size(); ++i) next[i] = (f * row[i + 1] - row[i]) / (f - 1.0L);
        prev_diag = diag;
        diag = next.back();
        err = std::fabs(diag - prev_diag);
        row = std::move(next);
      }
      out.value = static_cast<double>(diag);
      out.error_estimate = static_cast<double>(err);
      out.terms = count;
      if (err <= relative_tol * std::fabs(diag) && j >= 4) return out;
    }
  }
  // Budget exhausted: report the best available estimate.
  if (checkpoint_sum.empty()) out.value = static_cast<double>(sum.value());
  out.terms = max_terms;
  if (out.error_estimate == 0.0) out.error_estimate = INFINITY;
  return out;
}

}  // namespace poexp
