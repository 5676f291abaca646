// Momentum lattice of the periodic box and its Coulomb potential.
//
// Points: (2pi/L) Z^3 intersected with the closed ball |k| <= cutoff.
// Potential: W_L(x) = L^-3 [ sum_{k != 0} (4pi/|k|^2) e^{ikx} + mu L^2 ],
// the periodic Coulomb potential of a unit charge plus neutralizing
// background, normalized so min W_L = 0; mu is L-independent because
// W_L(x) = W_1(x/L)/L.
#pragma once

#include "qedvac/dirac.hpp"

#include <unordered_map>
#include <vector>

namespace qedvac {

struct LatticeSizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Lattice {
  double box_length = 0.0;
  double cutoff = 0.0;
  std::vector<Eigen::Vector3i> coords;  // integer m, k = (2pi/L) m, lexicographic
  std::vector<Vec3> k;
  double rho_half = 0.0;  // 2 |points| / L^3

  int size() const { return static_cast<int>(coords.size()); }

  /// index of integer coordinate m, or -1
  int index_of(const Eigen::Vector3i& m) const;

  double spacing() const { return 2.0 * M_PI / box_length; }

 private:
  friend Lattice build_lattice(double, double, int);
  std::unordered_map<int64_t, int> index_;
  int64_t key(const Eigen::Vector3i& m) const;
  int coord_span_ = 0;
};

/// Enumerates the lattice; throws LatticeSizeError beyond max_points (guard
/// for the dense-operator paths; translation-invariant solvers pass a higher
/// cap explicitly).
Lattice build_lattice(double box_length, double cutoff, int max_points = 4096);

/// mu: value added at k = 0 (as mu L^2) so that min W_L = 0. Computed once by
/// Ewald summation on the unit cell; the minimum sits at the cell corner.
double coulomb_background_constant();

struct PeriodicCoulomb {
  double box_length = 0.0;
  double mu = 0.0;

  /// Fourier coefficient: 4pi/|k|^2 for k != 0, mu L^2 at k = 0.
  double fourier(const Vec3& kvec) const;
  double fourier_sq(double k_squared) const;

  /// Real-space value by Ewald summation (used for reconstruction checks).
  double value(const Vec3& x) const;
};

PeriodicCoulomb periodic_coulomb(double box_length);

}  // namespace qedvac
