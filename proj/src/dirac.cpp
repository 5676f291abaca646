#include "qedvac/dirac.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace qedvac {

namespace {

std::array<Mat4, 3> make_alphas() {
  using cd = std::complex<double>;
  Eigen::Matrix2cd s1, s2, s3;
  s1 << 0, 1, 1, 0;
  s2 << 0, cd(0, -1), cd(0, 1), 0;
  s3 << 1, 0, 0, -1;
  std::array<Mat4, 3> out;
  const Eigen::Matrix2cd sig[3] = {s1, s2, s3};
  for (int i = 0; i < 3; ++i) {
    out[i].setZero();
    out[i].block<2, 2>(0, 2) = sig[i];
    out[i].block<2, 2>(2, 0) = sig[i];
  }
  return out;
}

Mat4 make_beta() {
  Mat4 b = Mat4::Zero();
  b(0, 0) = b(1, 1) = 1.0;
  b(2, 2) = b(3, 3) = -1.0;
  return b;
}

}  // namespace

const std::array<Mat4, 3>& alpha_matrices() {
  static const std::array<Mat4, 3> a = make_alphas();
  return a;
}

const Mat4& beta_matrix() {
  static const Mat4 b = make_beta();
  return b;
}

Mat4 DiracSymbol::matrix() const {
  const auto& al = alpha_matrices();
  Mat4 m = b * beta_matrix();
  for (int i = 0; i < 3; ++i) m += a[i] * al[i];
  return m;
}

DiracSymbol sign_of_symbol(const DiracSymbol& d, double floor) {
  const double r = d.radius();
  if (!(r > floor)) {
    throw DegenerateSymbolError("sign_of_symbol: gapless symbol, |a|^2+b^2 = " +
                                std::to_string(r * r));
  }
  return {d.a / r, d.b / r};
}

double symbol_trace_product(const DiracSymbol& A, const DiracSymbol& B) {
  return 4.0 * (A.a.dot(B.a) + A.b * B.b);
}

MatX negative_spectral_projector(const MatX& h, double gap_floor) {
  Eigen::SelfAdjointEigenSolver<MatX> es(h);
  const auto& ev = es.eigenvalues();
  const int n = static_cast<int>(ev.size());
  const double scale = std::max(std::abs(ev(0)), std::abs(ev(n - 1)));
  MatX p = MatX::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (std::abs(ev(i)) <= gap_floor * scale) {
      throw GapError("negative_spectral_projector: eigenvalue " + std::to_string(ev(i)) +
                         " inside the gap floor",
                     ev(i));
    }
    if (ev(i) < 0.0) p += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  }
  return p;
}

Mat4 negative_spectral_projector4(const Mat4& h, double gap_floor) {
  return negative_spectral_projector(MatX(h), gap_floor);
}

}  // namespace qedvac
