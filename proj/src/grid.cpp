#include "qedvac/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace qedvac {

namespace {

// Newton iteration on P_n, nodes seeded with the Chebyshev-like estimate.
QuadRule compute_gauss_legendre(int n) {
  QuadRule q;
  q.x.resize(n);
  q.w.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.x[i] = -x;
    q.x[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    q.w[i] = w;
    q.w[n - 1 - i] = w;
  }
  return q;
}

}  // namespace

const QuadRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  static std::map<int, QuadRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

QuadRule gauss_legendre(int n, double a, double b) {
  const QuadRule& base = gauss_legendre(n);
  QuadRule q;
  q.x.resize(n);
  q.w.resize(n);
  const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    q.x[i] = mid + hw * base.x[i];
    q.w[i] = hw * base.w[i];
  }
  return q;
}

RadialGrid RadialGrid::gauss(int n, double cutoff) {
  if (n < 2) throw std::invalid_argument("RadialGrid: need at least 2 nodes");
  if (!(cutoff > 0.0)) throw std::invalid_argument("RadialGrid: cutoff must be positive");
  QuadRule q = gauss_legendre(n, 0.0, cutoff);
  return RadialGrid{std::move(q.x), std::move(q.w), cutoff};
}

RadialFunction::RadialFunction(RadialGrid g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
  if (grid.r.size() != values.size())
    throw std::invalid_argument("RadialFunction: value count does not match grid");
  for (double y : values)
    if (!std::isfinite(y)) throw std::invalid_argument("RadialFunction: non-finite value");
}

PchipInterpolant::PchipInterpolant(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()) {
  const size_t n = x_.size();
  if (n < 2 || n != y_.size()) throw std::invalid_argument("pchip: bad input sizes");
  d_.resize(n);
  std::vector<double> h(n - 1), delta(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    if (!(h[i] > 0.0)) throw std::invalid_argument("pchip: nodes must be strictly increasing");
    delta[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  if (n == 2) {
    d_[0] = d_[1] = delta[0];
  } else {
    for (size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) {
        d_[i] = 0.0;
      } else {
        const double w1 = 2.0 * h[i] + h[i - 1];
        const double w2 = h[i] + 2.0 * h[i - 1];
        d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
      }
    }
    // one-sided ends, clamped to keep monotonicity (Fritsch-Carlson)
    auto end_slope = [](double h0, double h1, double d0, double d1) {
      double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
      if (d * d0 <= 0.0)
        d = 0.0;
      else if (d0 * d1 <= 0.0 && std::abs(d) > 3.0 * std::abs(d0))
        d = 3.0 * d0;
      return d;
    };
    d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  }
}

double PchipInterpolant::operator()(double t) const {
  const size_t n = x_.size();
  size_t i;
  if (t <= x_[0]) {
    i = 0;  // extrapolate with first cubic
  } else if (t >= x_[n - 1]) {
    i = n - 2;
  } else {
    i = std::upper_bound(x_.begin(), x_.end(), t) - x_.begin() - 1;
  }
  const double h = x_[i + 1] - x_[i];
  const double s = (t - x_[i]) / h;
  const double y0 = y_[i], y1 = y_[i + 1];
  const double d0 = d_[i] * h, d1 = d_[i + 1] * h;
  // cubic Hermite in s
  const double s2 = s * s, s3 = s2 * s;
  return y0 * (2 * s3 - 3 * s2 + 1) + d0 * (s3 - 2 * s2 + s) + y1 * (-2 * s3 + 3 * s2) +
         d1 * (s3 - s2);
}

}  // namespace qedvac
