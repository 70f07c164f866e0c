#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace tractlab {

inline int resolveWorkers(int workers) {
  if (workers > 0) return workers;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Static row partition; `fn(rowBegin, rowEnd)` must write only rows in its
// block, so results are identical for any worker count.
inline void parallelForRows(int rows, int workers,
                            const std::function<void(int, int)>& fn) {
  int w = std::min(resolveWorkers(workers), rows > 0 ? rows : 1);
  if (w <= 1) {
    fn(0, rows);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(w);
  int chunk = (rows + w - 1) / w;
  for (int t = 0; t < w; ++t) {
    int lo = t * chunk;
    int hi = std::min(rows, lo + chunk);
    if (lo >= hi) break;
    threads.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  for (auto& th : threads) th.join();
}

}  // namespace tractlab
