#pragma once

// Static-partition parallel map. Each index writes only its own output slot,
// so results do not depend on the thread count.

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace vopt {

/// Worker count: VOPT_THREADS when set to a positive integer, else the
/// hardware concurrency (at least 1).
inline unsigned thread_count()
{
  if (const char* env = std::getenv("VOPT_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0)
        return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls body(i) for i in [0, n). The first exception thrown by any worker is
/// rethrown on the calling thread.
template <typename Body>
void parallel_for(long n, Body&& body, long min_chunk = 64)
{
  if (n <= 0)
    return;
  const long workers = std::min<long>(thread_count(), std::max<long>(1, n / std::max<long>(1, min_chunk)));
  if (workers <= 1) {
    for (long i = 0; i < n; ++i)
      body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (long w = 0; w < workers; ++w) {
    const long begin = n * w / workers;
    const long end = n * (w + 1) / workers;
    pool.emplace_back([&, begin, end] {
      try {
        for (long i = begin; i < end; ++i)
          body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error)
          error = std::current_exception();
      }
    });
  }
  for (auto& t : pool)
    t.join();
  if (error)
    std::rethrow_exception(error);
}

} // namespace vopt
