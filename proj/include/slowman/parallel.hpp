#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace slowman {

// Worker count used by parallel_for; 0 means hardware concurrency.
void set_thread_count(int n);
int thread_count();

// Runs body(i) for i in [0, n) over contiguous, statically assigned chunks.
// Each index is written by exactly one worker, so results never depend on the
// thread count as long as body(i) only touches slot i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace slowman
