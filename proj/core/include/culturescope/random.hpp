#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace culturescope {

// mt19937_64 is fully specified by the standard; the distributions are not,
// so sampling helpers here are implemented directly for cross-platform
// reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n). n must be >= 1.
  std::uint64_t uniform_index(std::uint64_t n);

  // Uniform in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // k distinct indices from [0, n), in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace culturescope
