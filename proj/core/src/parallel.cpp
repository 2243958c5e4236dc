#include "pkam/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace pkam {

namespace {

std::atomic<int> g_override{0};

int env_threads() {
  static const int value = [] {
    if (const char* env = std::getenv("PKAM_THREADS")) {
      try {
        const int parsed = std::stoi(env);
        if (parsed > 0) return parsed;
      } catch (...) {
      }
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }();
  return value;
}

// Below this many points a loop is not worth spawning threads for.
constexpr std::size_t kMinChunk = 4096;

}  // namespace

int thread_count() {
  const int o = g_override.load();
  return o > 0 ? o : env_threads();
}

void set_thread_count(int threads) { g_override.store(std::max(0, threads)); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  const auto threads = static_cast<std::size_t>(thread_count());
  if (threads <= 1 || n < 2 * kMinChunk) {
    body(0, n);
    return;
  }
  const std::size_t workers = std::min(threads, n / kMinChunk);
  const std::size_t chunk = (n + workers - 1) / workers;
  // Errors are rethrown in chunk order so the reported failure does not
  // depend on scheduling.
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t b = w * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b < e) {
      pool.emplace_back([&body, &errors, w, b, e] {
        try {
          body(b, e);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  try {
    body(0, std::min(n, chunk));
  } catch (...) {
    errors[0] = std::current_exception();
  }
  for (auto& t : pool) t.join();
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

}  // namespace pkam
