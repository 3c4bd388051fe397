#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace plreg {

// Fixed-order pairwise summation.  Terms are grouped into blocks of a fixed
// size; block sums may be computed by any number of worker threads, but the
// blocking and the final combination order never depend on the thread count,
// so results are bit-stable.
namespace reduce {

inline constexpr std::size_t kBlock = 4096;

inline std::atomic<int>& thread_count_ref() {
  static std::atomic<int> n{1};
  return n;
}
inline void set_thread_count(int n) { thread_count_ref() = n < 1 ? 1 : n; }
inline int thread_count() { return thread_count_ref().load(); }

namespace detail {

// pairwise sum of f(i) over [lo, hi)
template <class F>
double pairwise(std::size_t lo, std::size_t hi, const F& f) {
  const std::size_t n = hi - lo;
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += f(i);
    return s;
  }
  const std::size_t mid = lo + n / 2;
  return pairwise(lo, mid, f) + pairwise(mid, hi, f);
}

inline double combine_blocks(const std::vector<double>& blocks) {
  return pairwise(0, blocks.size(), [&](std::size_t i) { return blocks[i]; });
}

}  // namespace detail

// sum of f(i) for i in [0, n)
template <class F>
double sum(std::size_t n, const F& f) {
  if (n == 0) return 0.0;
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<double> blocks(nblocks);
  const int threads = thread_count();
  if (threads <= 1 || nblocks < 4) {
    for (std::size_t b = 0; b < nblocks; ++b) {
      const std::size_t lo = b * kBlock;
      blocks[b] = detail::pairwise(lo, std::min(lo + kBlock, n), f);
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t b = next.fetch_add(1);
        if (b >= nblocks) return;
        const std::size_t lo = b * kBlock;
        blocks[b] = detail::pairwise(lo, std::min(lo + kBlock, n), f);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return detail::combine_blocks(blocks);
}

inline double sum(const std::vector<double>& v) {
  return sum(v.size(), [&](std::size_t i) { return v[i]; });
}

}  // namespace reduce
}  // namespace plreg
