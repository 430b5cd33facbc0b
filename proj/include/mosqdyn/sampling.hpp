#pragma once

// Counter-based uniform sampling and a small deterministic fan-out helper.
//
// Every random draw is a pure function of (seed, index, lane), so results do
// not depend on how work is split across threads.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <utility>
#include <thread>
#include <vector>

namespace mosqdyn {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stateless generator keyed by a seed; draw(index, lane) is reproducible
/// in any order.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) : key_(mix64(seed ^ 0x6a09e667f3bcc909ULL)) {}

  constexpr std::uint64_t bits(std::uint64_t index, std::uint32_t lane = 0) const {
    return mix64(key_ ^ mix64(index * 0x100000001b3ULL + lane));
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t index, std::uint32_t lane = 0) const {
    return static_cast<double>(bits(index, lane) >> 11) * 0x1.0p-53;
  }

  constexpr double uniform(std::uint64_t index, std::uint32_t lane, double lo, double hi) const {
    return lo + (hi - lo) * uniform(index, lane);
  }

  /// Independent child generator.
  constexpr CounterRng split(std::uint64_t stream) const { return CounterRng(key_ ^ mix64(~stream)); }

 private:
  std::uint64_t key_;
};

/// Worker count: MOSQDYN_THREADS if set to a positive integer, otherwise the
/// hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("MOSQDYN_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Splits [0, n) into contiguous chunks, runs fn(begin, end, chunk) on each,
/// and returns the per-chunk results in chunk order.
template <class Fn>
auto parallel_chunks(std::size_t n, Fn&& fn) {
  using R = decltype(fn(std::size_t{}, std::size_t{}, std::size_t{}));
  const std::size_t workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(n, 1));
  std::vector<R> results(workers);
  const std::size_t base = n / workers, extra = n % workers;
  auto bounds = [&](std::size_t c) {
    const std::size_t b = c * base + std::min(c, extra);
    return std::pair{b, b + base + (c < extra ? 1 : 0)};
  };
  if (workers == 1) {
    results[0] = fn(std::size_t{0}, n, std::size_t{0});
    return results;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t c = 0; c < workers; ++c) {
    pool.emplace_back([&, c] {
      try {
        const auto [b, e] = bounds(c);
        results[c] = fn(b, e, c);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
  return results;
}

/// Runs fn(i) for every i in [0, n); fn must only write state owned by i.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  parallel_chunks(n, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t i = b; i < e; ++i) fn(i);
    return 0;
  });
}

}  // namespace mosqdyn
