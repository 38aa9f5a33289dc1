#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace culturescope {

// Applies fn to every element with at most `workers` threads. Results land
// in input order; the first exception (by index) is rethrown after all
// workers join.
template <typename In, typename Fn>
auto parallel_map(const std::vector<In>& inputs, std::size_t workers, Fn fn)
    -> std::vector<decltype(fn(inputs[0]))> {
  using Out = decltype(fn(inputs[0]));
  std::vector<Out> results(inputs.size());
  std::vector<std::exception_ptr> errors(inputs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < inputs.size(); i = next++) {
      try {
        results[i] = fn(inputs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(inputs.size(), 1));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

}  // namespace culturescope
