#include "qedvac/util.hpp"

#include <atomic>
#include <cmath>

namespace qedvac {

double Rng::normal() {
  double u1 = uniform(), u2 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

namespace {
std::atomic<int> g_threads{1};
}

int worker_threads() { return g_threads.load(); }

void set_worker_threads(int n) { g_threads.store(n < 1 ? 1 : n); }

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  const int nw = std::min(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (int t = 0; t < nw; ++t) {
    pool.emplace_back([&, t] {
      for (int i = t; i < n; i += nw) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace qedvac
