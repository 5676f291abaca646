// Clifford algebra for 4x4 operators of the form alpha.a + b*beta, plus
// dense Hermitian utilities (spectral projectors) used throughout.
#pragma once

#include <Eigen/Core>
#include <array>
#include <stdexcept>
#include <string>

namespace qedvac {

using Mat4 = Eigen::Matrix4cd;
using MatX = Eigen::MatrixXcd;
using Vec3 = Eigen::Vector3d;

// Standard (Dirac) representation: beta = diag(1,1,-1,-1), alpha_i = offdiag(sigma_i).
const std::array<Mat4, 3>& alpha_matrices();
const Mat4& beta_matrix();

struct DegenerateSymbolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GapError : std::runtime_error {
  GapError(const std::string& msg, double ev) : std::runtime_error(msg), eigenvalue(ev) {}
  double eigenvalue;
};

/// Operator alpha.a + b*beta. Squares to (|a|^2 + b^2) * I, eigenvalues
/// +-sqrt(|a|^2 + b^2) with multiplicity two each.
struct DiracSymbol {
  Vec3 a{0.0, 0.0, 0.0};
  double b = 0.0;

  double radius() const { return std::sqrt(a.squaredNorm() + b * b); }
  Mat4 matrix() const;

  DiracSymbol operator+(const DiracSymbol& o) const { return {a + o.a, b + o.b}; }
  DiracSymbol operator-(const DiracSymbol& o) const { return {a - o.a, b - o.b}; }
  DiracSymbol operator*(double s) const { return {a * s, b * s}; }
};

/// sgn(alpha.a + b*beta) = (alpha.a + b*beta)/sqrt(|a|^2+b^2).
/// Throws DegenerateSymbolError when the radius is at or below the floor.
DiracSymbol sign_of_symbol(const DiracSymbol& d, double floor = 1e-300);

/// tr[(alpha.aA + bA*beta)(alpha.aB + bB*beta)] = 4(aA.aB + bA bB).
double symbol_trace_product(const DiracSymbol& A, const DiracSymbol& B);

/// Orthogonal projector onto the negative-eigenvalue subspace of a Hermitian
/// matrix. gap_floor is relative to the largest |eigenvalue|; an eigenvalue
/// inside the floor raises GapError carrying the offending value.
MatX negative_spectral_projector(const MatX& h, double gap_floor = 1e-9);
Mat4 negative_spectral_projector4(const Mat4& h, double gap_floor = 1e-9);

}  // namespace qedvac
