#include "lcorr/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <optional>
#include <vector>

#include "lcorr/errors.hpp"

namespace lcorr {
namespace {

std::size_t initial_worker_count() {
  if (const char* env = std::getenv("LORENTZ_CORRUGATE_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::atomic<std::size_t>& workers() {
  static std::atomic<std::size_t> count{initial_worker_count()};
  return count;
}

}  // namespace

std::size_t worker_count() { return workers().load(); }

void set_worker_count(std::size_t n) { workers().store(std::max<std::size_t>(1, n)); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t threads = std::min(worker_count(), std::max<std::size_t>(1, n / 256));
  if (threads <= 1) {
    body(0, n);
    return;
  }
  const std::size_t chunk = (n + threads - 1) / threads;
  std::vector<std::thread> pool;
  // One slot per chunk; the lowest failing chunk is rethrown so the reported
  // error does not depend on thread timing.
  std::vector<std::exception_ptr> failures(threads);
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, t, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        failures[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

void parallel_for_nodes(std::size_t n, const std::function<void(std::size_t)>& body) {
  std::vector<std::optional<Error>> errors(n);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      try {
        body(k);
      } catch (const Error& err) {
        errors[k] = err;
      }
    }
  });
  for (auto& err : errors) {
    if (err) throw *err;
  }
}

}  // namespace lcorr
