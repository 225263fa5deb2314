#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <random>

namespace adkyle {

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of the substream addressed by `path` under `master`. Distinct paths
/// give statistically independent streams; the mapping is platform independent.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

/// Standard normal and uniform draws from one substream.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Upper bound on worker threads for all parallel loops (0 = hardware
/// concurrency). Results never depend on this value.
void set_max_workers(unsigned workers);
unsigned max_workers();

/// Calls body(b) for b in [0, count) using up to max_workers() threads.
/// Each index runs exactly once; callers write into per-index slots and
/// reduce in index order afterwards.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace adkyle
