#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "souvlaki/error.hpp"

namespace souvlaki {

/// Worker count from SOUVLAKI_WORKERS, else the hardware concurrency.
inline unsigned worker_count() {
  if (const char* s = std::getenv("SOUVLAKI_WORKERS")) {
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end == s || *end != '\0' || v < 1 || v > 1024)
      throw DomainError("SOUVLAKI_WORKERS must be an integer in [1, 1024]");
    return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(chunk_begin, chunk_end, chunk_index) over [0, n) in contiguous
/// chunks. Chunk boundaries depend only on n and `chunks`, never on timing.
template <class Fn>
void parallel_chunks(std::size_t n, std::size_t chunks, Fn&& fn) {
  chunks = std::max<std::size_t>(1, std::min(chunks, n));
  const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(chunks));
  auto range = [&](std::size_t c) {
    return std::pair<std::size_t, std::size_t>{n * c / chunks, n * (c + 1) / chunks};
  };
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) fn(range(c).first, range(c).second, c);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t c = w; c < chunks; c += workers) fn(range(c).first, range(c).second, c);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace souvlaki
