#ifndef RIDGE_PARALLEL_HPP
#define RIDGE_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace ridge {

// Worker cap for parallel maps. 0 means hardware concurrency. The initial
// value comes from the RIDGE_THREADS environment variable when set.
void set_thread_count(int threads);
int thread_count();

// Runs fn(i) for i in [0, count) on a deterministic static partition.
// fn must only write to slot i of shared output.
void parallel_for(size_t count, const std::function<void(size_t)>& fn);

}  // namespace ridge

#endif
