#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace lrp {

inline unsigned effective_workers(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// Chunked parallel loop over [0, count). Each worker gets one contiguous
// range plus its worker id (for per-worker accumulators). Callers keep
// determinism by writing into per-index slots or by merging integer counts;
// floating-point reductions are done sequentially afterwards.
inline void parallel_for(std::int64_t count, unsigned workers,
                         const std::function<void(std::int64_t, std::int64_t, unsigned)>& fn) {
  workers = effective_workers(workers);
  if (count <= 0) return;
  if (workers == 1 || count == 1) {
    fn(0, count, 0);
    return;
  }
  if (static_cast<std::int64_t>(workers) > count) workers = static_cast<unsigned>(count);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const std::int64_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::int64_t begin = w * chunk;
    const std::int64_t end = std::min<std::int64_t>(count, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&fn, begin, end, w] { fn(begin, end, w); });
  }
  for (auto& t : threads) t.join();
}

}  // namespace lrp
