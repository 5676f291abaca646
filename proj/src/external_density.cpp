#include "qedvac/external_density.hpp"

#include "qedvac/grid.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace qedvac {

struct ExternalDensity::Table {
  std::vector<double> k;
  std::vector<double> re;
  std::vector<double> im;
  std::unique_ptr<PchipInterpolant> re_itp;
  std::unique_ptr<PchipInterpolant> im_itp;
};

ExternalDensity ExternalDensity::gaussian(double Z, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian density: sigma must be positive");
  ExternalDensity d;
  d.family_ = Family::gaussian;
  d.z_ = Z;
  d.sigma_ = sigma;
  return d;
}

ExternalDensity ExternalDensity::point_charge(double Z) {
  ExternalDensity d;
  d.family_ = Family::point_charge;
  d.z_ = Z;
  return d;
}

ExternalDensity ExternalDensity::tabulated_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("tabulated density: cannot open " + path);
  auto tab = std::make_shared<Table>();
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double k, re, im;
    if (ls >> k >> re >> im) {
      tab->k.push_back(k);
      tab->re.push_back(re);
      tab->im.push_back(im);
    }
  }
  if (tab->k.size() < 2)
    throw std::runtime_error("tabulated density: need at least two rows in " + path);
  for (size_t i = 1; i < tab->k.size(); ++i)
    if (tab->k[i] <= tab->k[i - 1])
      throw std::runtime_error("tabulated density: k column must be strictly increasing");
  tab->re_itp = std::make_unique<PchipInterpolant>(tab->k, tab->re);
  tab->im_itp = std::make_unique<PchipInterpolant>(tab->k, tab->im);
  ExternalDensity d;
  d.family_ = Family::tabulated;
  d.table_ = std::move(tab);
  return d;
}

std::complex<double> ExternalDensity::fourier(double k) const {
  static const double norm = std::pow(2.0 * M_PI, -1.5);
  switch (family_) {
    case Family::gaussian:
      return z_ * norm * std::exp(-0.5 * k * k * sigma_ * sigma_);
    case Family::point_charge:
      return z_ * norm;
    case Family::tabulated:
      return {(*table_->re_itp)(k), (*table_->im_itp)(k)};
  }
  return 0.0;
}

double ExternalDensity::coulomb_self_energy(double cutoff, int quad_points) const {
  const QuadRule q = gauss_legendre(quad_points, 0.0, cutoff);
  double s = 0.0;
  for (int i = 0; i < quad_points; ++i) s += q.w[i] * std::norm(fourier(q.x[i]));
  const double fourpi = 4.0 * M_PI;
  return fourpi * fourpi * s;
}

double ExternalDensity::coulomb_norm(double cutoff, int quad_points) const {
  return std::sqrt(coulomb_self_energy(cutoff, quad_points));
}

}  // namespace qedvac
