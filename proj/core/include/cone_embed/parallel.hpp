#pragma once

#include <cstdint>
#include <functional>

namespace cone_embed {

// Worker count used by parallel_for: hardware concurrency, capped by the
// CONE_EMBED_THREADS environment variable when set.
int worker_count();

// Runs fn(begin..end) split into contiguous chunks across workers.  Chunk
// boundaries depend only on (end - begin) and worker_count(), and workers
// write disjoint outputs, so results are schedule-independent.
void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t, std::int64_t)>& fn);

}  // namespace cone_embed
