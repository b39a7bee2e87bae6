#pragma once

#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace kaon {

/// Splits [0, n) into `workers` contiguous ranges and runs fn(begin, end) on
/// each, one thread per range. Exceptions are rethrown on the caller.
template <class Fn>
void parallel_ranges(std::uint64_t n, unsigned workers, Fn&& fn) {
  if (workers <= 1 || n < 2) {
    fn(std::uint64_t{0}, n);
    return;
  }
  if (workers > n) workers = static_cast<unsigned>(n);
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  const std::uint64_t step = n / workers, extra = n % workers;
  std::uint64_t begin = 0;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t end = begin + step + (w < extra ? 1 : 0);
    threads.emplace_back([&, w, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
    begin = end;
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace kaon
