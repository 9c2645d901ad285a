#pragma once

#include <cstddef>
#include <functional>

namespace hankelcp {

/// Worker count: set_thread_count() if called, else HANKELCP_THREADS, else hardware concurrency.
int thread_count();
void set_thread_count(int threads);

/// Runs body(i) for i in [0, n). Indices are split into contiguous blocks;
/// nested calls run serially on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace hankelcp
