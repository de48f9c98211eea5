#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include <Eigen/Core>

namespace convexlab {

inline constexpr std::uint64_t kDefaultSeed = 20240613;

// splitmix64; used both as a generator and to derive independent streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic little generator with portable output, so reports are
// byte-identical across platforms and thread counts.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = kDefaultSeed) : state_(seed) {
    // warm up so nearby seeds decorrelate
    splitmix64(state_);
    splitmix64(state_);
  }

  // Derive an independent stream for work item `index`; results then do not
  // depend on which worker processes the item.
  static Rng for_item(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL + index * 0xd1342543de82ef95ULL);
    return Rng(s);
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  // uniform in [0,1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

  // standard normal via Box-Muller (no caching; call order stays obvious)
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  Eigen::VectorXd gaussian_vector(int dim) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = normal();
    return v;
  }

  // uniform on the Euclidean unit sphere
  Eigen::VectorXd unit_vector(int dim) {
    for (;;) {
      Eigen::VectorXd v = gaussian_vector(dim);
      double n = v.norm();
      if (n > 1e-12) return v / n;
    }
  }

 private:
  std::uint64_t state_;
};

// Static-chunked parallel loop. Each item must be independent and write only
// to its own slot; reductions happen after the join, in index order, which
// keeps results identical for any thread count.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace convexlab
