#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace bimvs {

// Chunked parallel map over [0, n). Every invocation writes only to
// outputs owned by its own index, so results are identical for any
// thread count.
template <typename Fn>
void parallel_for(std::int64_t n, int threads, Fn&& fn) {
  if (n <= 0) return;
  if (threads <= 1 || n == 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const int workers = static_cast<int>(std::min<std::int64_t>(threads, n));
  const std::int64_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const std::int64_t begin = w * chunk;
    const std::int64_t end = std::min(n, begin + chunk);
    pool.emplace_back([begin, end, &fn] {
      for (std::int64_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

// splitmix64-style mixer; used to derive schedule-independent per-pixel
// RNG streams from (seed, level, round, x, y).
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) {
  return mix64(seed ^ mix64(v));
}

// Small counter-based generator: state advances by remixing.
class PixelRng {
 public:
  explicit PixelRng(std::uint64_t state) : state_(state) {}

  std::uint64_t next() {
    state_ = mix64(state_ + 0x9e3779b97f4a7c15ULL);
    return state_;
  }
  // Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

inline PixelRng pixel_rng(std::uint64_t seed, std::uint64_t level,
                          std::uint64_t round, std::uint64_t x,
                          std::uint64_t y) {
  std::uint64_t s = mix64(seed);
  s = hash_combine(s, level);
  s = hash_combine(s, round);
  s = hash_combine(s, x);
  s = hash_combine(s, y);
  return PixelRng(s);
}

}  // namespace bimvs
