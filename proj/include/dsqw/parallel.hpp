#pragma once

#include <future>
#include <thread>

namespace dsqw::par {

inline int hardware_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

inline int spawn_depth_for(int threads) {
  if (threads <= 0) threads = hardware_threads();
  int d = 0;
  while ((1 << d) < threads) ++d;
  return d;
}

// Deterministic binary-tree reduction over [lo, hi). The tree shape depends
// only on (lo, hi, grain), so merged floating-point results are bit-identical
// for any worker count; `depth` only controls whether subtrees get their own
// thread. Fold accumulates one index into a partial, Merge combines partials.
template <class Partial, class Fold, class Merge>
Partial tree_reduce(long lo, long hi, long grain, int depth, const Fold& fold,
                    const Merge& merge) {
  if (hi - lo <= grain) {
    Partial acc;
    for (long i = lo; i < hi; ++i) fold(acc, i);
    return acc;
  }
  const long mid = lo + (hi - lo) / 2;
  if (depth > 0) {
    auto right = std::async(std::launch::async, [&] {
      return tree_reduce<Partial>(mid, hi, grain, depth - 1, fold, merge);
    });
    Partial left = tree_reduce<Partial>(lo, mid, grain, depth - 1, fold, merge);
    Partial rv = right.get();
    merge(left, rv);
    return left;
  }
  Partial left = tree_reduce<Partial>(lo, mid, grain, 0, fold, merge);
  Partial rv = tree_reduce<Partial>(mid, hi, grain, 0, fold, merge);
  merge(left, rv);
  return left;
}

}  // namespace dsqw::par
