// Dirac-Fock model on the momentum lattice of the periodic box.
//
// One Fourier convention is used everywhere and pinned by the
// finite-difference gradient test: W_L(x) = L^-3 sum_m What(m) e^{imx},
// a state's density is rho(x) = sum_m c(m) e^{imx} with
// c(m) = L^-3 sum_{k-l=m} tr gamma(k,l), and the external density samples a
// continuum transform, n_L(x) = (2pi)^{3/2} L^-3 sum_{k in lattice} n(|k|) e^{ikx}.
//
// Energy of a self-adjoint gamma (spectrum in [-1/2, 1/2]):
//   E(gamma) = tr(D0 gamma) - alpha D_L(n_L, rho) + (alpha/2) D_L(rho, rho)
//              - (alpha/2) iint |gamma(x,y)|^2 W_L(x-y),
// with D_L(f,g) = L^3 sum_m What(m) conj(c_f(m)) c_g(m). Its gradient is the
// mean-field operator D0 + alpha (rho - n_L) * W_L - alpha gamma(x,y) W_L(x-y).
#pragma once

#include "qedvac/dirac.hpp"
#include "qedvac/errors.hpp"
#include "qedvac/external_density.hpp"
#include "qedvac/lattice.hpp"
#include "qedvac/util.hpp"

#include <complex>
#include <memory>
#include <optional>
#include <vector>

namespace qedvac {

struct TISymbolState {
  std::vector<DiracSymbol> f;  // one symbol per lattice point
};

struct TorusSolveOptions {
  double mixing = 0.5;
  double tol = 1e-11;
  int max_iter = 500;
  int threads = 0;
};

class TorusModel {
 public:
  TorusModel(Lattice lattice, double m0, double alpha,
             std::shared_ptr<const ExternalDensity> density = nullptr);

  const Lattice& lattice() const { return lattice_; }
  double m0() const { return m0_; }
  double alpha() const { return alpha_; }
  const PeriodicCoulomb& coulomb() const { return coulomb_; }
  bool has_density() const { return density_ != nullptr; }
  const ExternalDensity* density() const { return density_.get(); }

  /// What evaluated at the integer coordinate difference d (k = (2pi/L) d).
  double w_hat(const Eigen::Vector3i& d) const;
  double w_hat_by_table(size_t t) const { return wtable_[t]; }

  DiracSymbol free_symbol(int i) const {  // D0(k_i)
    return DiracSymbol{lattice_.k[i], m0_};
  }

  /// n_L Fourier coefficient on lattice point i: (2pi)^{3/2} L^-3 n(|k_i|).
  std::complex<double> external_coefficient(int i) const;

  /// D_L(n_L, n_L); the k = 0 mode carries weight mu L^2.
  double density_self_energy() const;

  // ---- translation-invariant states in symbol form (field-free sector) ----
  double energy(const TISymbolState& s) const;
  TISymbolState mean_field(const TISymbolState& s) const;

  // ---- general states: gamma is 4n x 4n, block (i,j) at (4i, 4j) ----
  int dim() const { return 4 * lattice_.size(); }
  double energy(const MatX& gamma) const;
  MatX mean_field(const MatX& gamma) const;
  MatX exchange_operator(const MatX& gamma) const;  // gamma(x,y) W_L(x-y)
  /// density coefficients c(m) indexed like the difference table
  std::vector<std::complex<double>> density_coefficients(const MatX& gamma) const;
  std::complex<double> density_coefficient(const MatX& gamma, const Eigen::Vector3i& d) const;

  MatX block_diagonal(const TISymbolState& s) const;
  MatX free_operator() const;  // block-diagonal D0

  // difference-table geometry (shared with the density coefficients)
  int table_span() const { return span_; }
  int table_index(const Eigen::Vector3i& d) const;

 private:
  Lattice lattice_;
  double m0_ = 1.0;
  double alpha_ = 0.0;
  PeriodicCoulomb coulomb_;
  std::shared_ptr<const ExternalDensity> density_;
  int span_ = 0;                       // coords range in [-span, span]
  std::vector<double> wtable_;         // What over the difference cube
  std::vector<std::complex<double>> ext_;  // c_n per lattice point
  int threads_ = 0;
};

struct TISolveResult {
  TISymbolState state;
  TISymbolState mean_field;  // converged operator symbols
  double energy = 0.0;
  double energy_per_volume = 0.0;
  double residual = 0.0;
  int iterations = 0;
  /// min over k of |D_L(k)|^2 - |k|^2 - m0^2/4 (expected >= 0 for large boxes)
  double gap_margin = 0.0;
};

/// Field-free self-consistent solve, f(k) = -D_L(k)/(2|D_L(k)|), damped.
TISolveResult solve_torus_ti(const TorusModel& model, const TorusSolveOptions& opt = {});

struct GeneralMinimizeResult {
  MatX gamma;
  double energy = 0.0;
  double off_diagonal_norm = 0.0;  // Frobenius norm of off-diagonal blocks
  int iterations = 0;
  double residual = 0.0;           // final projector-map residual
  std::vector<double> start_energies;
};

struct GeneralMinimizeOptions {
  int starts = 8;
  double tol = 1e-10;
  int max_pg_iter = 300;
  int max_polish_iter = 400;
  double polish_mixing = 0.5;
  int dense_cap = 15;  // lattice points; dense algebra guard
  uint64_t seed = 1;
};

/// Dense minimization of the energy over the spectral box [-1/2, 1/2]:
/// projected descent from seeded random states, then a damped projector
/// polish. Small lattices only.
GeneralMinimizeResult minimize_general(const TorusModel& model,
                                       const GeneralMinimizeOptions& opt = {});

/// Largest eigenvalue of |D0|^{-1/2} W_L |D0|^{-1/2} on the lattice at mass m.
/// All entries of the matrix are positive, so the top eigenvector is invariant
/// under the octahedral symmetry of the lattice and the computation collapses
/// exactly onto symmetry orbits; max_points guards the pre-reduction size.
double kato_constant(double box_length, double cutoff, double mass,
                     int max_points = 200000);

struct PenalizedResult {
  std::vector<Mat4> theta;   // per lattice point, 0 <= theta <= 1
  double rho = 0.0;          // L^-3 sum_k tr theta(k)
  double energy = 0.0;
  int iterations = 0;
  double kernel_sup = 0.0;   // sup_x |xi_L(x)| over a sample grid
  double kernel_bound = 0.0; // (2pi)^{3/2} rho
};

/// Translation-invariant minimization with the uncompensated direct term
/// (alpha/2) mu L^5 rho^2, over 0 <= Theta <= 1: projected descent on the
/// per-mode blocks. The direct term penalizes any nonzero mean density.
PenalizedResult minimize_penalized(const TorusModel& model, int max_iter = 4000,
                                   double tol = 1e-12);

}  // namespace qedvac
