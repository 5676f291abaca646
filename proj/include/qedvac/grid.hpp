// Radial quadrature grids on (0, cutoff] and monotone cubic interpolation.
#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace qedvac {

struct QuadRule {
  std::vector<double> x;  // nodes
  std::vector<double> w;  // weights
};

/// Gauss-Legendre rule on [-1, 1]; nodes ascending. Cached per order.
const QuadRule& gauss_legendre(int n);

/// Gauss-Legendre rule mapped to [a, b].
QuadRule gauss_legendre(int n, double a, double b);

/// Momentum-magnitude grid on (0, cutoff]: Gauss-Legendre nodes and weights,
/// so sum(w) = cutoff up to rounding and integrals of smooth radial functions
/// are spectrally accurate. The endpoint 0 is never a node.
struct RadialGrid {
  std::vector<double> r;
  std::vector<double> w;
  double cutoff = 0.0;

  static RadialGrid gauss(int n, double cutoff);
  int size() const { return static_cast<int>(r.size()); }
};

struct RadialFunction {
  RadialGrid grid;
  std::vector<double> values;

  RadialFunction() = default;
  RadialFunction(RadialGrid g, std::vector<double> v);
};

/// Fritsch-Carlson monotone cubic (pchip). Evaluation outside the node range
/// extrapolates with the boundary cubic; used for the r -> 0 endpoint.
class PchipInterpolant {
 public:
  PchipInterpolant(std::span<const double> x, std::span<const double> y);
  explicit PchipInterpolant(const RadialFunction& f)
      : PchipInterpolant(f.grid.r, f.values) {}

  double operator()(double t) const;

 private:
  std::vector<double> x_, y_, d_;
};

}  // namespace qedvac
