#include "kscdf/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace kscdf {

unsigned worker_count(unsigned hint) {
  unsigned workers = hint != 0 ? hint : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("KSCDF_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap > 0) workers = std::min<unsigned>(workers, static_cast<unsigned>(cap));
    } catch (const std::exception&) {
      // ignore malformed values
    }
  }
  return workers;
}

void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body) {
  workers = std::max(1u, workers);
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const auto spawn = std::min<std::size_t>(workers, count);
  pool.reserve(spawn);
  for (std::size_t t = 0; t < spawn; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace kscdf
