#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace armrl::par {

// Reduction granularity. Work is split into fixed blocks of this size and the
// per-block partials are merged in block order, so results do not depend on
// the number of threads.
inline constexpr std::size_t kBlockSize = 64;

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

// Deterministic block map-reduce over indices [0, n).
//   make():            -> Acc   fresh zero accumulator
//   body(acc, i):      fold element i into acc (sequential within a block)
//   merge(total, acc): fold a block partial into the running total
// Block partials are computed in parallel; the merge runs sequentially in
// block order, so the result is bitwise identical for any thread count.
template <class Acc, class Make, class Body, class Merge>
Acc block_reduce(std::size_t n, Make make, Body body, Merge merge) {
  const std::size_t num_blocks = (n + kBlockSize - 1) / kBlockSize;
  if (num_blocks <= 1) {
    Acc total = make();
    for (std::size_t i = 0; i < n; ++i) body(total, i);
    return total;
  }

  std::vector<Acc> partials;
  partials.reserve(num_blocks);
  for (std::size_t b = 0; b < num_blocks; ++b) partials.push_back(make());

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(num_blocks); ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kBlockSize;
    const std::size_t end = std::min(begin + kBlockSize, n);
    Acc& acc = partials[static_cast<std::size_t>(b)];
    for (std::size_t i = begin; i < end; ++i) body(acc, i);
  }

  Acc total = std::move(partials[0]);
  for (std::size_t b = 1; b < num_blocks; ++b) merge(total, partials[b]);
  return total;
}

// Plain parallel loop (no reduction); body(i) must only touch slot i.
template <class Body>
void parallel_for(std::size_t n, Body body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    body(static_cast<std::size_t>(i));
  }
}

}  // namespace armrl::par
