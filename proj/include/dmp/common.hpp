#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace dmp {

// Planner/graph/map files that fail to parse or carry an unsupported version.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// BVP endpoints that already violate the velocity/acceleration box.
class InfeasibleBoundaryError : public std::runtime_error {
 public:
  explicit InfeasibleBoundaryError(const std::string& msg) : std::runtime_error(msg) {}
};

// Obstacle placement could not satisfy the spacing constraint within the retry budget.
class PlacementError : public std::runtime_error {
 public:
  explicit PlacementError(const std::string& msg) : std::runtime_error(msg) {}
};

// Planning query whose start state is in collision or outside the dynamic limits.
class InvalidStartError : public std::runtime_error {
 public:
  explicit InvalidStartError(const std::string& msg) : std::runtime_error(msg) {}
};

// mt19937_64 with a fixed bits-to-double mapping. uniform_real_distribution is
// not pinned by the standard, so seeded outputs would not be reproducible
// across standard libraries without this.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

// Chunked parallel map over [0, n). fn(i) must only write state owned by
// index i; the merge order is index order, so results are deterministic.
template <typename F>
void parallel_for(std::size_t n, F&& fn, unsigned num_threads = 0) {
  if (num_threads == 0) num_threads = std::max(1u, std::thread::hardware_concurrency());
  if (num_threads <= 1 || n < 2 * num_threads) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(num_threads);
  const std::size_t chunk = (n + num_threads - 1) / num_threads;
  for (unsigned t = 0; t < num_threads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace dmp
