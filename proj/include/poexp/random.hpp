#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <random>
#include <span>
#include <thread>
#include <vector>

namespace poexp {

/// splitmix64 finalizer; used to derive independent substream seeds.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// One reproducible random stream: mt19937_64 keyed by (seed, stream index).
///
/// Variates are produced by explicit inverse transforms on 53-bit uniforms, never through
/// std distributions, so sequences are identical across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(splitmix64(seed ^ splitmix64(stream + 0x5DEECE66DULL))) {}

  /// Uniform on (0, 1].
  double uniform() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }
  /// Exp(rate) by inversion; rate > 0.
  double exponential(double rate) { return -std::log(uniform()) / rate; }
  /// Index drawn with the given probabilities (assumed to sum to 1).
  std::size_t discrete(std::span<const double> probs);

 private:
  std::mt19937_64 engine_;
};

inline std::size_t RandomStream::discrete(std::span<const double> probs) {
  const double u = uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    acc += probs[i];
    if (u <= acc) return i;
  }
  return probs.size() - 1;
}

/// Welford mean/variance, mergeable with Chan's formula.
struct RunningStats {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    count += 1.0;
    const double d = x - mean;
    mean += d / count;
    m2 += d * (x - mean);
  }
  void merge(const RunningStats& o) {
    if (o.count == 0.0) return;
    if (count == 0.0) {
      *this = o;
      return;
    }
    const double n = count + o.count;
    const double d = o.mean - mean;
    mean += d * o.count / n;
    m2 += o.m2 + d * d * count * o.count / n;
    count = n;
  }
  [[nodiscard]] double variance() const { return count > 1.0 ? m2 / (count - 1.0) : 0.0; }
  [[nodiscard]] double standard_error() const { return count > 1.0 ? std::sqrt(variance() / count) : 0.0; }
};

/// Paths are processed in fixed blocks of this size; block results merge in block order.
inline constexpr std::size_t kPathBlock = 1024;

[[nodiscard]] inline std::size_t default_workers() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

/// Evaluate `block(begin, end)` over [0, n_items) in fixed-size blocks on `workers` threads and
/// return the per-block results in block order. The partition never depends on `workers`, so any
/// in-order reduction of the result is bit-identical for every worker count.
template <class Result, class BlockFn>
std::vector<Result> run_blocks(std::size_t n_items, std::size_t workers, BlockFn block) {
  const std::size_t n_blocks = (n_items + kPathBlock - 1) / kPathBlock;
  std::vector<Result> results(n_blocks);
  std::vector<std::exception_ptr> failures(n_blocks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t b = next++; b < n_blocks; b = next++) {
      try {
        results[b] = block(b * kPathBlock, std::min(n_items, (b + 1) * kPathBlock));
      } catch (...) {
        failures[b] = std::current_exception();
      }
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, n_blocks));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  // The lowest failing block wins, independent of scheduling.
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return results;
}

}  // namespace poexp
