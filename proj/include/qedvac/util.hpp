#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace qedvac {

/// splitmix64-seeded xorshift-style generator with explicit output transforms,
/// so streams are identical across platforms and standard-library versions.
class Rng {
 public:
  explicit Rng(uint64_t seed) : s_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  uint64_t next_u64() {
    uint64_t z = (s_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// standard normal via Box-Muller (always consumes two uniforms)
  double normal();

  /// derive an independent stream (for per-cell seeding in sweeps)
  Rng fork(uint64_t salt) { return Rng(next_u64() ^ (salt * 0x2545f4914f6cdd1dull + 1)); }

 private:
  uint64_t s_;
};

/// Runs fn(i) for i in [0, n) on up to `threads` workers, contiguous shards.
/// Callers own determinism: each index writes only its own slot.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

/// Global worker count used by solver hot loops; set once from the CLI.
int worker_threads();
void set_worker_threads(int n);

}  // namespace qedvac
