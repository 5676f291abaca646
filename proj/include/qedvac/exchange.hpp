// Angular-reduced exchange kernels. The map
//   h |-> (alpha/pi) * int_0^cutoff (v/r) Q_j(z(r,v)) h(v) dv,
// z(r,v) = (r^2+v^2)/(2rv), is the radial reduction of the 3d integral
//   (alpha/2pi^2) * int_{|q|<=cutoff} w_j(p,q) h(|q|) / |p-q|^2 dq
// with w_0 = 1 and w_1 = (p/|p|).(q/|q|). The oracle below evaluates the 3d
// form directly and is the ground truth for the reduction.
#pragma once

#include "qedvac/dirac.hpp"
#include "qedvac/grid.hpp"

namespace qedvac {

/// Q_0(z) = 0.5 * ln((z+1)/(z-1)) for z > 1; throws std::domain_error otherwise.
double legendre_q0(double z);

/// Q_1(z) = z * Q_0(z) - 1 for z > 1.
double legendre_q1(double z);

struct ExchangeQuad {
  // Gauss-Legendre points per panel; the integral is split at v = r where the
  // kernel has an integrable logarithmic singularity.
  int panel_points = 256;
};

/// Radial exchange integral (kernel index j in {0,1}) of h at radius r.
/// h is interpolated between its nodes; r must lie in (0, cutoff].
double exchange_transform(int j, const RadialFunction& h, double r, double alpha,
                          const ExchangeQuad& quad = {});

/// Same transform with a prebuilt interpolant (hot path for solvers).
double exchange_transform(int j, const PchipInterpolant& h, double cutoff, double r,
                          double alpha, const ExchangeQuad& quad = {});

struct OracleQuad {
  // 2 x radial_points radial nodes (split at |q| = |p|) and
  // polar_panels x polar_points polar nodes graded toward the collinear
  // direction, where 1/|p-q|^2 peaks.
  int radial_points = 200;
  int polar_points = 50;
  int polar_panels = 8;
};

/// Direct 3d evaluation of the exchange integral by deterministic product
/// quadrature (radial x polar; the azimuthal integral is analytic by
/// rotational symmetry). Independent of the Q_j closed forms.
double angular_reduction_oracle(int j, const RadialFunction& h, const Vec3& p, double alpha,
                                const OracleQuad& quad = {});

}  // namespace qedvac
