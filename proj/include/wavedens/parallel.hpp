#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace wavedens {

//! Runs fn(i) for i in [0, count) on up to `workers` threads. Each index is
//! processed exactly once; callers store results by index, so the outcome
//! does not depend on scheduling. If any call throws, the exception from
//! the lowest failing index is rethrown after all workers finish.
template <class Fn>
void
parallel_for(std::size_t count, unsigned workers, Fn&& fn)
{
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i)
      fn(i);
    return;
  }
  std::atomic<std::size_t> next{ 0 };
  std::vector<std::exception_ptr> errors(count);
  const auto body = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned used = std::min<unsigned>(workers, static_cast<unsigned>(count));
  for (unsigned w = 1; w < used; ++w)
    pool.emplace_back(body);
  body();
  for (auto& t : pool)
    t.join();
  for (auto& e : errors)
    if (e)
      std::rethrow_exception(e);
}

inline unsigned
default_workers()
{
  return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace wavedens
