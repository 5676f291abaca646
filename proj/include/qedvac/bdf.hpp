// Energy of lattice states measured relative to the self-consistent free
// vacuum of the same lattice, and the polarized-vacuum fixed point in an
// external density.
//
// Reference: the field-free translation-invariant solution (f0_L, D0_L) of
// the same discretization. With gamma = gamma0 + Q this makes
//   E(Q) = tr(D0_L Q) + (alpha/2) D_L(rho_Q, rho_Q) - alpha D_L(rho_Q, n_L)
//          - (alpha/2) iint |Q(x,y)|^2 W_L(x-y)
// exactly equal to E_L^phi(gamma) - E_L^0(gamma0), so relative energies,
// constraint bookkeeping and the two mean-field assemblies are consistent on
// a fixed lattice and converge to the whole-space objects as L grows.
#pragma once

#include "qedvac/torus.hpp"

namespace qedvac {

class BdfModel {
 public:
  explicit BdfModel(TorusModel model, const TorusSolveOptions& reference_opt = {});

  const TorusModel& torus() const { return torus_; }
  const TISolveResult& reference() const { return ref_; }
  double reference_energy() const { return ref_.energy; }

  /// Block-diagonal projector onto the negative subspace of D0_L.
  const MatX& projector_minus() const { return p_minus_; }
  const MatX& reference_gamma() const { return gamma0_; }
  const MatX& reference_operator() const { return d0_; }

  MatX gamma_of(const MatX& q) const { return gamma0_ + q; }

  double energy(const MatX& q) const;

  /// D0_L + alpha (rho_Q - n_L) * W_L - alpha Q(x,y) W_L(x-y).
  MatX mean_field(const MatX& q) const;

  /// Same operator assembled from gamma = gamma0 + Q through the bare D0
  /// route; equals mean_field(q) identically, which pins the reference
  /// independence of the self-consistent equation.
  MatX mean_field_from_gamma(const MatX& gamma) const { return torus_.mean_field(gamma); }

  /// tr(P+ Q P+) + tr(P- Q P-): the charge relative to the reference.
  double p0_trace(const MatX& q) const;

  /// Most negative margin of the spectrum of P0- + Q against [0, 1];
  /// >= 0 (up to rounding) iff -P0- <= Q <= P0+.
  double constraint_margin(const MatX& q) const;

  /// Norm of the projected steepest-descent step at gamma0 + Q, divided by
  /// the step length; ~0 at a constrained stationary point.
  double projected_gradient_norm(const MatX& q) const;

 private:
  TorusModel torus_;
  TISolveResult ref_;
  MatX d0_;       // block-diagonal D0_L
  MatX gamma0_;   // block-diagonal reference state
  MatX p_minus_;  // gamma0 + 1/2
};

struct PolarizedVacuumOptions {
  double mixing = 0.3;
  double tol = 1e-8;
  int max_iter = 300;
  double gap_floor = 1e-9;  // relative to ||D||; a crossing aborts the solve
};

struct PolarizedVacuumResult {
  MatX q;
  double energy = 0.0;
  double residual = 0.0;
  int iterations = 0;
  double p0_trace = 0.0;
  double gap = 0.0;  // smallest |eigenvalue| of the converged mean field
  std::vector<double> history;
};

/// Fixed point P = chi_(-inf,0)(D[P - P0]) by damped iteration on Q = P - P0.
PolarizedVacuumResult solve_polarized_vacuum(const BdfModel& model,
                                             const PolarizedVacuumOptions& opt = {});

struct UniquenessCheck {
  bool pass = false;
  double middle = 0.0;  // the quantity required to lie in [0, 1]
  double brace = 0.0;   // denominator factor; <= 0 makes the bound vacuous
  std::string reason;
};

/// Smallness condition on (alpha, ||n||_C) under which the minimizer is
/// unique and the vacuum neutral:
///   0 <= (alpha pi/4) / {1 - alpha ((pi/2) sqrt((alpha/2)/(1-alpha pi/4))
///                          + pi^(1/6) 2^(11/6)) ||n||_C} <= 1.
UniquenessCheck uniqueness_condition_check(double alpha, double coulomb_norm);

struct ThermoDifferenceRow {
  double box_length = 0.0;
  int points = 0;
  double energy_external = 0.0;  // min E_L^phi
  double energy_free = 0.0;      // E_L(0)
  double difference = 0.0;
  double bdf_minimum = 0.0;
  double consistency_gap = 0.0;  // |difference - bdf_minimum|, same lattice
};

struct ThermoDifferenceOptions {
  GeneralMinimizeOptions general;
  PolarizedVacuumOptions bdf;
  TorusSolveOptions reference;
};

/// For each box size: dense minimization with the external term, the
/// field-free reference, and the relative-energy minimum on the same lattice.
std::vector<ThermoDifferenceRow> thermo_difference(
    double m0, double alpha, double cutoff, std::shared_ptr<const ExternalDensity> density,
    const std::vector<double>& box_lengths, const ThermoDifferenceOptions& opt = {});

}  // namespace qedvac
