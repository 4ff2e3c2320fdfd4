#include <cone_embed/parallel.hpp>

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace cone_embed {

int worker_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  if (const char* cap = std::getenv("CONE_EMBED_THREADS")) {
    int c = std::atoi(cap);
    if (c >= 1) n = std::min(n, c);
  }
  return n;
}

void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t, std::int64_t)>& fn) {
  const std::int64_t total = end - begin;
  if (total <= 0) return;
  const int workers = static_cast<int>(std::min<std::int64_t>(worker_count(), total));
  if (workers <= 1) {
    fn(begin, end);
    return;
  }
  const std::int64_t chunk = (total + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    const std::int64_t lo = begin + w * chunk;
    const std::int64_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace cone_embed
