#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace boostmetric::detail {

// Chunk boundaries depend only on n, never on the job count, so per-chunk
// partial results can be combined in chunk order for bit-stable reductions.
inline constexpr int kChunkSize = 4096;

inline int chunk_count(int n) { return n <= 0 ? 0 : (n + kChunkSize - 1) / kChunkSize; }

// Runs fn(chunk_index, begin, end) for every chunk of [0, n), possibly on
// several threads. fn must only write to chunk-local storage.
inline void for_each_chunk(int n, int jobs,
                           const std::function<void(int, int, int)>& fn) {
  const int chunks = chunk_count(n);
  if (chunks == 0) return;
  jobs = std::max(1, std::min(jobs, chunks));
  if (jobs == 1) {
    for (int c = 0; c < chunks; ++c)
      fn(c, c * kChunkSize, std::min(n, (c + 1) * kChunkSize));
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([=, &fn] {
      for (int c = w; c < chunks; c += jobs)
        fn(c, c * kChunkSize, std::min(n, (c + 1) * kChunkSize));
    });
  }
  for (auto& t : workers) t.join();
}

}  // namespace boostmetric::detail
