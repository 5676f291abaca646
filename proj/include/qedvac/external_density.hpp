// External charge densities entering through their Fourier transform n(k),
// restricted to |k| <= cutoff. Coulomb pairing D(f,g) = 4pi int conj(f) g /|k|^2.
#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

namespace qedvac {

class ExternalDensity {
 public:
  enum class Family { gaussian, point_charge, tabulated };

  /// n(k) = Z (2pi)^{-3/2} exp(-k^2 sigma^2 / 2): total charge Z, width sigma.
  static ExternalDensity gaussian(double Z, double sigma);

  /// Band-limited point charge: n(k) = Z (2pi)^{-3/2} for all |k| <= cutoff.
  static ExternalDensity point_charge(double Z);

  /// Plain-text table "k value_real value_imag" per line, '#' comments,
  /// cubic interpolation in k.
  static ExternalDensity tabulated_from_file(const std::string& path);

  Family family() const { return family_; }
  double charge() const { return z_; }
  double width() const { return sigma_; }

  std::complex<double> fourier(double k) const;

  /// D(n, n) = (4pi)^2 int_0^cutoff |n(k)|^2 dk (radial reduction; the 1/k^2
  /// weight cancels against the volume element).
  double coulomb_self_energy(double cutoff, int quad_points = 400) const;

  /// ||n||_C = sqrt(D(n,n)).
  double coulomb_norm(double cutoff, int quad_points = 400) const;

 private:
  Family family_ = Family::gaussian;
  double z_ = 0.0;
  double sigma_ = 1.0;
  struct Table;
  std::shared_ptr<const Table> table_;
};

}  // namespace qedvac
