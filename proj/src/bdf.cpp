#include "qedvac/bdf.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <sstream>

namespace qedvac {

namespace {
using cd = std::complex<double>;
}

BdfModel::BdfModel(TorusModel model, const TorusSolveOptions& reference_opt)
    : torus_(std::move(model)), ref_(solve_torus_ti(torus_, reference_opt)) {
  const int n = torus_.lattice().size();
  d0_ = MatX::Zero(4 * n, 4 * n);
  gamma0_ = MatX::Zero(4 * n, 4 * n);
  for (int i = 0; i < n; ++i) {
    d0_.block<4, 4>(4 * i, 4 * i) = ref_.mean_field.f[i].matrix();
    gamma0_.block<4, 4>(4 * i, 4 * i) = ref_.state.f[i].matrix();
  }
  p_minus_ = gamma0_ + 0.5 * MatX::Identity(4 * n, 4 * n);
}

double BdfModel::energy(const MatX& q) const {
  const auto& lat = torus_.lattice();
  const int n = lat.size();
  if (q.rows() != 4 * n || q.cols() != 4 * n)
    throw std::invalid_argument("BdfModel: state dimension does not match the lattice");
  const double alpha = torus_.alpha();
  const double L3 = std::pow(lat.box_length, 3);
  double kin = 0.0;
  for (int i = 0; i < n; ++i)
    kin += std::real((ref_.mean_field.f[i].matrix() * q.block<4, 4>(4 * i, 4 * i)).trace());
  if (alpha == 0.0) return kin;
  const auto c = torus_.density_coefficients(q);
  double direct = 0.0;
  for (size_t t = 0; t < c.size(); ++t)
    if (c[t] != cd(0, 0)) direct += torus_.w_hat_by_table(t) * std::norm(c[t]);
  double ext = 0.0;
  if (torus_.has_density()) {
    for (int i = 0; i < n; ++i) {
      const auto& m = lat.coords[i];
      ext += torus_.w_hat(m) *
             std::real(std::conj(torus_.external_coefficient(i)) * c[torus_.table_index(m)]);
    }
  }
  const MatX r = torus_.exchange_operator(q);
  const double exch = std::real((r.adjoint() * q).trace());
  return kin + 0.5 * alpha * L3 * direct - alpha * L3 * ext - 0.5 * alpha * exch;
}

MatX BdfModel::mean_field(const MatX& q) const {
  const auto& lat = torus_.lattice();
  const int n = lat.size();
  MatX d = d0_;
  const double alpha = torus_.alpha();
  if (alpha == 0.0) return d;
  const auto c = torus_.density_coefficients(q);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Eigen::Vector3i dm = lat.coords[i] - lat.coords[j];
      cd v = c[torus_.table_index(dm)];
      if (torus_.has_density()) {
        const int jext = lat.index_of(dm);
        if (jext >= 0) v -= torus_.external_coefficient(jext);
      }
      if (v != cd(0.0, 0.0))
        d.block<4, 4>(4 * i, 4 * j) += alpha * torus_.w_hat(dm) * v * Mat4::Identity();
    }
  d -= alpha * torus_.exchange_operator(q);
  return d;
}

double BdfModel::p0_trace(const MatX& q) const {
  const int n = torus_.lattice().size();
  double tr = 0.0;
  for (int i = 0; i < n; ++i) {
    const Mat4 pm = p_minus_.block<4, 4>(4 * i, 4 * i);
    const Mat4 pp = Mat4::Identity() - pm;
    const Mat4 blk = q.block<4, 4>(4 * i, 4 * i);
    tr += std::real((pp * blk * pp).trace() + (pm * blk * pm).trace());
  }
  return tr;
}

double BdfModel::constraint_margin(const MatX& q) const {
  Eigen::SelfAdjointEigenSolver<MatX> es(MatX(p_minus_ + q), Eigen::EigenvaluesOnly);
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    margin = std::min(margin, es.eigenvalues()(i));
    margin = std::min(margin, 1.0 - es.eigenvalues()(i));
  }
  return margin;
}

double BdfModel::projected_gradient_norm(const MatX& q) const {
  const MatX d = mean_field(q);
  const MatX p = p_minus_ + q;
  const double eta = 0.1 / std::max(d.operatorNorm(), 1e-30);
  Eigen::SelfAdjointEigenSolver<MatX> es(MatX(p - eta * d));
  Eigen::VectorXd w = es.eigenvalues();
  for (int i = 0; i < w.size(); ++i) w(i) = std::clamp(w(i), 0.0, 1.0);
  const MatX pc = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
  return (pc - p).norm() / eta;
}

PolarizedVacuumResult solve_polarized_vacuum(const BdfModel& model,
                                             const PolarizedVacuumOptions& opt) {
  const int dim = model.torus().dim();
  MatX q = MatX::Zero(dim, dim);
  PolarizedVacuumResult out;
  double res = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    const MatX d = model.mean_field(q);
    Eigen::SelfAdjointEigenSolver<MatX> es(d);
    const auto& ev = es.eigenvalues();
    const double top = std::max(std::abs(ev(0)), std::abs(ev(dim - 1)));
    double gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dim; ++i) gap = std::min(gap, std::abs(ev(i)));
    if (gap <= opt.gap_floor * top) {
      throw GapError("solve_polarized_vacuum: mean-field eigenvalue " +
                         std::to_string(gap) + " inside the gap floor",
                     gap);
    }
    out.gap = gap;
    MatX p = MatX::Zero(dim, dim);
    for (int i = 0; i < dim; ++i)
      if (ev(i) < 0.0) p += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
    const MatX qn = p - model.projector_minus();
    res = (qn - q).norm();
    out.history.push_back(res);
    q = (1.0 - opt.mixing) * q + opt.mixing * qn;
    if (res <= opt.tol) {
      ++it;
      break;
    }
  }
  if (res > opt.tol) {
    std::ostringstream os;
    os << "solve_polarized_vacuum: residual " << res << " after " << opt.max_iter
       << " iterations";
    throw NonConvergenceError(os.str(), std::move(out.history));
  }
  out.q = std::move(q);
  out.energy = model.energy(out.q);
  out.residual = res;
  out.iterations = it;
  out.p0_trace = model.p0_trace(out.q);
  return out;
}

UniquenessCheck uniqueness_condition_check(double alpha, double coulomb_norm) {
  UniquenessCheck out;
  if (alpha < 0.0 || coulomb_norm < 0.0)
    throw ParameterError("uniqueness_condition_check: negative inputs");
  if (alpha > kMaxCoupling + 1e-12)
    throw ParameterError("uniqueness_condition_check: requires alpha <= 4/pi");
  if (coulomb_norm == 0.0) {
    out.brace = 1.0;  // the norm-dependent term vanishes identically
  } else {
    if (alpha >= kMaxCoupling) {
      out.pass = false;
      out.reason = "alpha at 4/pi with a nonzero density: bound vacuous";
      return out;
    }
    const double root = std::sqrt(0.5 * alpha / (1.0 - alpha * M_PI / 4.0));
    const double factor = 0.5 * M_PI * root + std::pow(M_PI, 1.0 / 6.0) * std::pow(2.0, 11.0 / 6.0);
    out.brace = 1.0 - alpha * factor * coulomb_norm;
  }
  if (out.brace <= 0.0) {
    out.pass = false;
    out.reason = "denominator factor not positive: density too strong for the bound";
    return out;
  }
  out.middle = alpha * M_PI / 4.0 / out.brace;
  out.pass = out.middle >= 0.0 && out.middle <= 1.0 + 1e-12;
  if (!out.pass) out.reason = "middle quantity outside [0, 1]";
  return out;
}

std::vector<ThermoDifferenceRow> thermo_difference(
    double m0, double alpha, double cutoff, std::shared_ptr<const ExternalDensity> density,
    const std::vector<double>& box_lengths, const ThermoDifferenceOptions& opt) {
  std::vector<ThermoDifferenceRow> rows;
  for (double L : box_lengths) {
    Lattice lat = build_lattice(L, cutoff, opt.general.dense_cap);
    TorusModel model(lat, m0, alpha, density);
    BdfModel bdf(model, opt.reference);
    ThermoDifferenceRow row;
    row.box_length = L;
    row.points = lat.size();
    row.energy_free = bdf.reference_energy();
    if (!density) {
      // no external field: the two problems coincide term by term
      row.energy_external = row.energy_free;
      row.difference = 0.0;
      row.bdf_minimum = 0.0;
      row.consistency_gap = 0.0;
    } else {
      GeneralMinimizeResult gen = minimize_general(model, opt.general);
      row.energy_external = gen.energy;
      row.difference = row.energy_external - row.energy_free;
      PolarizedVacuumResult pv = solve_polarized_vacuum(bdf, opt.bdf);
      row.bdf_minimum = pv.energy;
      row.consistency_gap = std::abs(row.difference - row.bdf_minimum);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qedvac
