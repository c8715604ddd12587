#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace excluwall {

/// Runs body(index, workspace) for index in [0, count) on up to `threads`
/// workers. Each worker owns a default-constructed Workspace. Results land in
/// slot `index`, so the output does not depend on the thread count.
template <class Workspace, class Result, class Body>
std::vector<Result> run_replicas(std::size_t count, unsigned threads, Body&& body) {
  std::vector<Result> out(count);
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    Workspace ws;
    for (std::size_t i = 0; i < count; ++i) out[i] = body(i, ws);
    return out;
  }
  constexpr std::size_t chunk = 64;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    Workspace ws;
    try {
      for (;;) {
        const std::size_t start = next.fetch_add(chunk);
        if (start >= count) break;
        const std::size_t stop = std::min(count, start + chunk);
        for (std::size_t i = start; i < stop; ++i) out[i] = body(i, ws);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(count);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace excluwall
