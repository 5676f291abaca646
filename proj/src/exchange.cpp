#include "qedvac/exchange.hpp"

#include <cmath>

namespace qedvac {

double legendre_q0(double z) {
  if (!(z > 1.0)) throw std::domain_error("legendre_q0: requires z > 1");
  return 0.5 * std::log1p(2.0 / (z - 1.0));
}

double legendre_q1(double z) {
  if (!(z > 1.0)) throw std::domain_error("legendre_q1: requires z > 1");
  return z * legendre_q0(z) - 1.0;
}

namespace {

// Kernel factors evaluated from the radii directly; forming z - 1 by
// subtraction underflows when |r - v| ~ sqrt(eps) * r.
inline double kernel_q(int j, double r, double v) {
  const double q0 = std::log((r + v) / std::abs(r - v));
  if (j == 0) return q0;
  const double z = 0.5 * (r / v + v / r);
  return z * q0 - 1.0;
}

template <class Eval>
double split_panel_integral(int j, const Eval& h, double cutoff, double r, int n) {
  double total = 0.0;
  const double bounds[2][2] = {{0.0, r}, {r, cutoff}};
  const QuadRule& base = gauss_legendre(n);
  for (const auto& ab : bounds) {
    const double a = ab[0], b = ab[1];
    if (!(b > a)) continue;
    const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = mid + hw * base.x[i];
      s += hw * base.w[i] * (v / r) * kernel_q(j, r, v) * h(v);
    }
    total += s;
  }
  return total;
}

}  // namespace

double exchange_transform(int j, const PchipInterpolant& h, double cutoff, double r,
                          double alpha, const ExchangeQuad& quad) {
  if (j != 0 && j != 1) throw std::invalid_argument("exchange_transform: kernel index not in {0,1}");
  if (!(r > 0.0) || r > cutoff * (1.0 + 1e-12))
    throw std::domain_error("exchange_transform: r outside (0, cutoff]");
  if (alpha == 0.0) return 0.0;
  return alpha / M_PI *
         split_panel_integral(j, [&](double v) { return h(v); }, cutoff, r, quad.panel_points);
}

double exchange_transform(int j, const RadialFunction& h, double r, double alpha,
                          const ExchangeQuad& quad) {
  PchipInterpolant itp(h);
  return exchange_transform(j, itp, h.grid.cutoff, r, alpha, quad);
}

double angular_reduction_oracle(int j, const RadialFunction& h, const Vec3& p, double alpha,
                                const OracleQuad& quad) {
  if (j != 0 && j != 1) throw std::invalid_argument("angular_reduction_oracle: kernel index");
  const double cutoff = h.grid.cutoff;
  const double r = p.norm();
  if (!(r > 0.0) || r > cutoff * (1.0 + 1e-12))
    throw std::domain_error("angular_reduction_oracle: |p| outside (0, cutoff]");
  if (alpha == 0.0) return 0.0;
  PchipInterpolant itp(h);

  // With p on the polar axis the integrand depends on (v, u = cos(theta))
  // only; the azimuthal integral contributes 2*pi. The remaining double
  // integral is  int dv v^2 h(v) int du w(u) / (A - B u),  A = r^2 + v^2,
  // B = 2 r v. The u-integrand peaks at u = 1 with width ~ (A-B)/B, so the
  // polar panels are geometrically graded toward u = 1.
  const QuadRule& pol = gauss_legendre(quad.polar_points);
  const QuadRule& rad = gauss_legendre(quad.radial_points);

  double total = 0.0;
  const double bounds[2][2] = {{0.0, r}, {r, cutoff}};
  for (const auto& ab : bounds) {
    const double a = ab[0], b = ab[1];
    if (!(b > a)) continue;
    const double midv = 0.5 * (a + b), hwv = 0.5 * (b - a);
    for (int iv = 0; iv < quad.radial_points; ++iv) {
      const double v = midv + hwv * rad.x[iv];
      const double wv = hwv * rad.w[iv];
      const double A = r * r + v * v, B = 2.0 * r * v;
      const double eps = std::max((A - B) / B, 1e-15);
      // breakpoints 1 - g, g geometric from 2 (i.e. u = -1) down to eps
      std::vector<double> cuts;
      cuts.push_back(-1.0);
      const int np = quad.polar_panels;
      const double ratio = std::pow(2.0 / eps, 1.0 / (np - 1));
      for (int t = np - 2; t >= 0; --t) {
        const double u = 1.0 - eps * std::pow(ratio, t);
        if (u > cuts.back()) cuts.push_back(u);
      }
      cuts.push_back(1.0);
      double inner = 0.0;
      for (size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double lo = cuts[c], hi = cuts[c + 1];
        const double midu = 0.5 * (lo + hi), hwu = 0.5 * (hi - lo);
        for (int iu = 0; iu < quad.polar_points; ++iu) {
          const double u = midu + hwu * pol.x[iu];
          double f = 1.0 / (A - B * u);
          if (j == 1) f *= u;
          inner += hwu * pol.w[iu] * f;
        }
      }
      total += wv * v * v * itp(v) * inner;
    }
  }
  return alpha / M_PI * total;
}

}  // namespace qedvac
