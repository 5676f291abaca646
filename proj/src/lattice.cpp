#include "qedvac/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qedvac {

namespace {

// Ewald pieces for the unit cell (L = 1): the zero-mean periodic potential
//   psi(x) = sum_{k in 2pi Z^3, k != 0} (4pi/|k|^2) e^{ik.x}
// equals  sum_n erfc(sqrt(eta)|x-n|)/|x-n|
//       + sum_{k != 0} (4pi/|k|^2) exp(-|k|^2/(4 eta)) cos(k.x) - pi/eta,
// with the n = 0 real-space term replaced by its x -> 0 limit at a site.
constexpr double kEta = 6.0;
constexpr int kRealRange = 3;
constexpr int kRecipRange = 8;

double ewald_psi_unit(const Vec3& x) {
  double s = 0.0;
  for (int nx = -kRealRange; nx <= kRealRange; ++nx)
    for (int ny = -kRealRange; ny <= kRealRange; ++ny)
      for (int nz = -kRealRange; nz <= kRealRange; ++nz) {
        const Vec3 d = x - Vec3(nx, ny, nz);
        const double r = d.norm();
        if (r < 1e-14) {
          s += -2.0 * std::sqrt(kEta / M_PI);
        } else {
          s += std::erfc(std::sqrt(kEta) * r) / r;
        }
      }
  for (int mx = -kRecipRange; mx <= kRecipRange; ++mx)
    for (int my = -kRecipRange; my <= kRecipRange; ++my)
      for (int mz = -kRecipRange; mz <= kRecipRange; ++mz) {
        if (mx == 0 && my == 0 && mz == 0) continue;
        const double k2 = 4.0 * M_PI * M_PI * (mx * mx + my * my + mz * mz);
        const double kx = 2.0 * M_PI * (mx * x[0] + my * x[1] + mz * x[2]);
        s += 4.0 * M_PI / k2 * std::exp(-k2 / (4.0 * kEta)) * std::cos(kx);
      }
  return s - M_PI / kEta;
}

}  // namespace

int64_t Lattice::key(const Eigen::Vector3i& m) const {
  const int64_t s = coord_span_;
  return (static_cast<int64_t>(m[0]) + s) +
         (2 * s + 1) * ((static_cast<int64_t>(m[1]) + s) +
                        (2 * s + 1) * (static_cast<int64_t>(m[2]) + s));
}

int Lattice::index_of(const Eigen::Vector3i& m) const {
  if (std::abs(m[0]) > coord_span_ || std::abs(m[1]) > coord_span_ ||
      std::abs(m[2]) > coord_span_)
    return -1;
  auto it = index_.find(key(m));
  return it == index_.end() ? -1 : it->second;
}

Lattice build_lattice(double box_length, double cutoff, int max_points) {
  if (!(box_length > 0.0) || !(cutoff > 0.0))
    throw std::invalid_argument("build_lattice: box length and cutoff must be positive");
  Lattice lat;
  lat.box_length = box_length;
  lat.cutoff = cutoff;
  const double radius = cutoff * box_length / (2.0 * M_PI);
  // closed ball; tiny relative slack keeps boundary shells stable against
  // rounding in cutoff * L / 2pi
  const double r2max = radius * radius * (1.0 + 1e-12) + 1e-12;
  const int span = static_cast<int>(std::floor(radius + 1e-9));
  lat.coord_span_ = span;
  for (int mx = -span; mx <= span; ++mx)
    for (int my = -span; my <= span; ++my)
      for (int mz = -span; mz <= span; ++mz) {
        const double m2 = double(mx) * mx + double(my) * my + double(mz) * mz;
        if (m2 <= r2max) lat.coords.emplace_back(mx, my, mz);
      }
  std::sort(lat.coords.begin(), lat.coords.end(), [](const auto& a, const auto& b) {
    return std::tie(a[0], a[1], a[2]) < std::tie(b[0], b[1], b[2]);
  });
  if (static_cast<int>(lat.coords.size()) > max_points) {
    std::ostringstream os;
    os << "build_lattice: " << lat.coords.size() << " points exceeds the configured cap "
       << max_points;
    throw LatticeSizeError(os.str());
  }
  lat.k.reserve(lat.coords.size());
  const double h = lat.spacing();
  for (size_t i = 0; i < lat.coords.size(); ++i) {
    lat.k.emplace_back(h * lat.coords[i][0], h * lat.coords[i][1], h * lat.coords[i][2]);
    lat.index_[lat.key(lat.coords[i])] = static_cast<int>(i);
  }
  lat.rho_half = 2.0 * lat.coords.size() / std::pow(box_length, 3);
  return lat;
}

double coulomb_background_constant() {
  static const double mu = -ewald_psi_unit(Vec3(0.5, 0.5, 0.5));
  return mu;
}

double PeriodicCoulomb::fourier(const Vec3& kvec) const {
  return fourier_sq(kvec.squaredNorm());
}

double PeriodicCoulomb::fourier_sq(double k_squared) const {
  if (k_squared < 1e-20) return mu * box_length * box_length;
  return 4.0 * M_PI / k_squared;
}

double PeriodicCoulomb::value(const Vec3& x) const {
  return (ewald_psi_unit(x / box_length) + mu) / box_length;
}

PeriodicCoulomb periodic_coulomb(double box_length) {
  if (!(box_length > 0.0)) throw std::invalid_argument("periodic_coulomb: L must be positive");
  return PeriodicCoulomb{box_length, coulomb_background_constant()};
}

}  // namespace qedvac
