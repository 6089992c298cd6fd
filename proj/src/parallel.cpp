#include "rgg/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rgg {

namespace {
std::atomic<unsigned> g_threads{1};
}

void set_threads(unsigned n) { g_threads = std::max(1u, n); }
unsigned threads() { return g_threads; }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t t = std::min<std::size_t>(g_threads, n);
  if (t <= 1) {
    if (n > 0) body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex mu;
  const std::size_t chunk = (n + t - 1) / t;
  for (std::size_t k = 0; k < t; ++k) {
    const std::size_t b = k * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&, b, e] {
      try {
        body(b, e);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace rgg
