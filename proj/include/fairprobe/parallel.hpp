#pragma once

#include <cstddef>
#include <functional>

namespace fairprobe {

// Worker count for parallel_for. 0 restores the hardware default.
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs fn(begin, end) over fixed-size chunks of [0, n). Chunk boundaries do
// not depend on the worker count, so per-chunk outputs assembled in chunk
// order are identical for any --threads value.
void parallel_for(std::size_t n, std::size_t chunk,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace fairprobe
