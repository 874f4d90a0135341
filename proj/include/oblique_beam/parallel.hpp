#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace oblique_beam {

/// 0 means one worker per hardware thread.
inline unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Worker cap from OBLIQUE_BEAM_THREADS; unset, empty or invalid means auto.
inline unsigned workers_from_env() {
  const char* raw = std::getenv("OBLIQUE_BEAM_THREADS");
  if (raw == nullptr || *raw == '\0') return resolve_workers(0);
  try {
    const long v = std::stol(raw);
    return resolve_workers(v > 0 ? static_cast<unsigned>(v) : 0u);
  } catch (const std::exception&) {
    return resolve_workers(0);
  }
}

/// Runs body(i) for i in [0, n) on up to `workers` threads. Items are
/// independent; the first exception thrown is rethrown after all joins.
template <typename Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
  workers = std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace oblique_beam
