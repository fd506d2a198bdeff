#include "hrom/util/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace hrom {

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& task) {
  if (n == 0) return;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!first) first = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

std::size_t workers_from_env(std::size_t fallback) {
  const char* v = std::getenv("HYBRID_ROM_WORKERS");
  if (!v || !*v) return fallback;
  try {
    std::size_t pos = 0;
    const long long n = std::stoll(v, &pos);
    if (pos != std::string(v).size() || n < 1) return fallback;
    return static_cast<std::size_t>(n);
  } catch (...) {
    return fallback;
  }
}

}  // namespace hrom
