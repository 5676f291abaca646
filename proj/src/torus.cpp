#include "qedvac/torus.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace qedvac {

namespace {

using cd = std::complex<double>;

inline Mat4 clip_spectrum(const Mat4& h, double lo, double hi) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(h);
  Eigen::Vector4d w = es.eigenvalues();
  for (int i = 0; i < 4; ++i) w(i) = std::clamp(w(i), lo, hi);
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

MatX clip_spectrum(const MatX& h, double lo, double hi) {
  Eigen::SelfAdjointEigenSolver<MatX> es(h);
  Eigen::VectorXd w = es.eigenvalues();
  for (int i = 0; i < w.size(); ++i) w(i) = std::clamp(w(i), lo, hi);
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

MatX half_sign_negative(const MatX& h) {  // -sgn(h)/2, kernel mapped to 0
  Eigen::SelfAdjointEigenSolver<MatX> es(h);
  Eigen::VectorXd w = es.eigenvalues();
  for (int i = 0; i < w.size(); ++i) w(i) = w(i) > 0.0 ? -0.5 : (w(i) < 0.0 ? 0.5 : 0.0);
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

TorusModel::TorusModel(Lattice lattice, double m0, double alpha,
                       std::shared_ptr<const ExternalDensity> density)
    : lattice_(std::move(lattice)),
      m0_(m0),
      alpha_(alpha),
      coulomb_(periodic_coulomb(lattice_.box_length)),
      density_(std::move(density)) {
  if (!(m0_ > 0.0)) throw std::invalid_argument("TorusModel: m0 must be positive");
  if (alpha_ < 0.0) throw std::invalid_argument("TorusModel: alpha must be non-negative");
  for (const auto& m : lattice_.coords)
    span_ = std::max({span_, std::abs(m[0]), std::abs(m[1]), std::abs(m[2])});
  const int side = 4 * span_ + 1;
  wtable_.resize(static_cast<size_t>(side) * side * side);
  const double h = lattice_.spacing();
  for (int dx = -2 * span_; dx <= 2 * span_; ++dx)
    for (int dy = -2 * span_; dy <= 2 * span_; ++dy)
      for (int dz = -2 * span_; dz <= 2 * span_; ++dz) {
        const double k2 = h * h * (double(dx) * dx + double(dy) * dy + double(dz) * dz);
        wtable_[table_index(Eigen::Vector3i(dx, dy, dz))] = coulomb_.fourier_sq(k2);
      }
  if (density_) {
    ext_.resize(lattice_.size());
    const double scale = std::pow(2.0 * M_PI, 1.5) / std::pow(lattice_.box_length, 3);
    for (int i = 0; i < lattice_.size(); ++i)
      ext_[i] = scale * density_->fourier(lattice_.k[i].norm());
  }
}

int TorusModel::table_index(const Eigen::Vector3i& d) const {
  const int side = 4 * span_ + 1;
  return (d[0] + 2 * span_) + side * ((d[1] + 2 * span_) + side * (d[2] + 2 * span_));
}

double TorusModel::w_hat(const Eigen::Vector3i& d) const { return wtable_[table_index(d)]; }

std::complex<double> TorusModel::external_coefficient(int i) const {
  return density_ ? ext_[i] : cd(0.0, 0.0);
}

double TorusModel::density_self_energy() const {
  if (!density_) return 0.0;
  double s = 0.0;
  for (int i = 0; i < lattice_.size(); ++i)
    s += w_hat(lattice_.coords[i]) * std::norm(ext_[i]);
  return std::pow(lattice_.box_length, 3) * s;
}

double TorusModel::energy(const TISymbolState& s) const {
  const int n = lattice_.size();
  if (static_cast<int>(s.f.size()) != n)
    throw std::invalid_argument("TISymbolState size does not match the lattice");
  const double L3 = std::pow(lattice_.box_length, 3);
  double kin = 0.0;
  for (int i = 0; i < n; ++i)
    kin += 4.0 * (lattice_.k[i].dot(s.f[i].a) + m0_ * s.f[i].b);
  if (alpha_ == 0.0) return kin;
  const int threads = worker_threads();
  std::vector<double> partial(n, 0.0);
  parallel_for(n, threads, [&](int i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const double w = wtable_[table_index(lattice_.coords[i] - lattice_.coords[j])];
      acc += w * (s.f[i].a.dot(s.f[j].a) + s.f[i].b * s.f[j].b);
    }
    partial[i] = acc;
  });
  double exch = 0.0;
  for (double p : partial) exch += p;
  // trace-free symbol states carry no mean density: no direct/external term
  return kin - alpha_ / (2.0 * L3) * 4.0 * exch;
}

TISymbolState TorusModel::mean_field(const TISymbolState& s) const {
  const int n = lattice_.size();
  if (static_cast<int>(s.f.size()) != n)
    throw std::invalid_argument("TISymbolState size does not match the lattice");
  const double L3 = std::pow(lattice_.box_length, 3);
  TISymbolState out;
  out.f.resize(n);
  const int threads = worker_threads();
  parallel_for(n, threads, [&](int i) {
    Vec3 ca(0, 0, 0);
    double cb = 0.0;
    for (int j = 0; j < n; ++j) {
      const double w = wtable_[table_index(lattice_.coords[i] - lattice_.coords[j])];
      ca += w * s.f[j].a;
      cb += w * s.f[j].b;
    }
    out.f[i].a = lattice_.k[i] - alpha_ / L3 * ca;
    out.f[i].b = m0_ - alpha_ / L3 * cb;
  });
  return out;
}

std::vector<cd> TorusModel::density_coefficients(const MatX& gamma) const {
  const int n = lattice_.size();
  const double L3 = std::pow(lattice_.box_length, 3);
  std::vector<cd> c(wtable_.size(), cd(0, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const cd t = gamma.block<4, 4>(4 * i, 4 * j).trace();
      c[table_index(lattice_.coords[i] - lattice_.coords[j])] += t / L3;
    }
  return c;
}

cd TorusModel::density_coefficient(const MatX& gamma, const Eigen::Vector3i& d) const {
  return density_coefficients(gamma)[table_index(d)];
}

MatX TorusModel::exchange_operator(const MatX& gamma) const {
  const int n = lattice_.size();
  const double L3 = std::pow(lattice_.box_length, 3);
  MatX r = MatX::Zero(4 * n, 4 * n);
  for (int i = 0; i < n; ++i)
    for (int ip = 0; ip < n; ++ip) {
      const Eigen::Vector3i d = lattice_.coords[i] - lattice_.coords[ip];
      const double w = wtable_[table_index(d)] / L3;
      for (int j = 0; j < n; ++j) {
        const int jp = lattice_.index_of(lattice_.coords[j] - d);
        if (jp >= 0) r.block<4, 4>(4 * i, 4 * j) += w * gamma.block<4, 4>(4 * ip, 4 * jp);
      }
    }
  return r;
}

double TorusModel::energy(const MatX& gamma) const {
  const int n = lattice_.size();
  if (gamma.rows() != 4 * n || gamma.cols() != 4 * n)
    throw std::invalid_argument("state dimension does not match the lattice");
  const double L3 = std::pow(lattice_.box_length, 3);
  double kin = 0.0;
  for (int i = 0; i < n; ++i) {
    kin += std::real((free_symbol(i).matrix() * gamma.block<4, 4>(4 * i, 4 * i)).trace());
  }
  if (alpha_ == 0.0) return kin;
  const auto c = density_coefficients(gamma);
  double direct = 0.0;
  for (size_t t = 0; t < c.size(); ++t) direct += wtable_[t] * std::norm(c[t]);
  double ext = 0.0;
  if (density_) {
    for (int i = 0; i < n; ++i) {
      const auto& m = lattice_.coords[i];
      ext += w_hat(m) * std::real(std::conj(ext_[i]) * c[table_index(m)]);
    }
  }
  const MatX r = exchange_operator(gamma);
  const double exch = std::real((r.adjoint() * gamma).trace());
  return kin + 0.5 * alpha_ * L3 * direct - alpha_ * L3 * ext - 0.5 * alpha_ * exch;
}

MatX TorusModel::mean_field(const MatX& gamma) const {
  const int n = lattice_.size();
  if (gamma.rows() != 4 * n || gamma.cols() != 4 * n)
    throw std::invalid_argument("state dimension does not match the lattice");
  MatX d = MatX::Zero(4 * n, 4 * n);
  for (int i = 0; i < n; ++i) d.block<4, 4>(4 * i, 4 * i) = free_symbol(i).matrix();
  if (alpha_ == 0.0) return d;
  const auto c = density_coefficients(gamma);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Eigen::Vector3i dm = lattice_.coords[i] - lattice_.coords[j];
      cd v = c[table_index(dm)];
      if (density_) {
        const int jext = lattice_.index_of(dm);  // n_L has modes on the lattice only
        if (jext >= 0) v -= ext_[jext];
      }
      if (v != cd(0.0, 0.0))
        d.block<4, 4>(4 * i, 4 * j) += alpha_ * w_hat(dm) * v * Mat4::Identity();
    }
  d -= alpha_ * exchange_operator(gamma);
  return d;
}

MatX TorusModel::block_diagonal(const TISymbolState& s) const {
  const int n = lattice_.size();
  MatX g = MatX::Zero(4 * n, 4 * n);
  for (int i = 0; i < n; ++i) g.block<4, 4>(4 * i, 4 * i) = s.f[i].matrix();
  return g;
}

MatX TorusModel::free_operator() const {
  const int n = lattice_.size();
  MatX g = MatX::Zero(4 * n, 4 * n);
  for (int i = 0; i < n; ++i) g.block<4, 4>(4 * i, 4 * i) = free_symbol(i).matrix();
  return g;
}

TISolveResult solve_torus_ti(const TorusModel& model, const TorusSolveOptions& opt) {
  const auto& lat = model.lattice();
  const int n = lat.size();
  TISymbolState f;
  f.f.resize(n);
  for (int i = 0; i < n; ++i) {
    const double e = std::sqrt(lat.k[i].squaredNorm() + model.m0() * model.m0());
    f.f[i].a = -lat.k[i] / (2.0 * e);
    f.f[i].b = -model.m0() / (2.0 * e);
  }
  double res = 0.0;
  int it = 0;
  std::vector<double> history;
  for (; it < opt.max_iter; ++it) {
    TISymbolState d = model.mean_field(f);
    res = 0.0;
    for (int i = 0; i < n; ++i) {
      const double nr = d.f[i].radius();
      const DiracSymbol next{-d.f[i].a / (2.0 * nr), -d.f[i].b / (2.0 * nr)};
      res = std::max(res, (next.a - f.f[i].a).cwiseAbs().maxCoeff());
      res = std::max(res, std::abs(next.b - f.f[i].b));
      f.f[i].a = (1.0 - opt.mixing) * f.f[i].a + opt.mixing * next.a;
      f.f[i].b = (1.0 - opt.mixing) * f.f[i].b + opt.mixing * next.b;
    }
    history.push_back(res);
    if (res <= opt.tol) {
      ++it;
      break;
    }
  }
  if (res > opt.tol) {
    std::ostringstream os;
    os << "solve_torus_ti: residual " << res << " after " << opt.max_iter << " iterations";
    throw NonConvergenceError(os.str(), std::move(history));
  }
  TISolveResult out;
  out.state = f;
  out.mean_field = model.mean_field(f);
  out.energy = model.energy(f);
  out.energy_per_volume = out.energy / std::pow(lat.box_length, 3);
  out.residual = res;
  out.iterations = it;
  out.gap_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double d2 = out.mean_field.f[i].a.squaredNorm() + out.mean_field.f[i].b * out.mean_field.f[i].b;
    out.gap_margin = std::min(
        out.gap_margin, d2 - lat.k[i].squaredNorm() - 0.25 * model.m0() * model.m0());
  }
  return out;
}

GeneralMinimizeResult minimize_general(const TorusModel& model,
                                       const GeneralMinimizeOptions& opt) {
  const int n = model.lattice().size();
  if (n > opt.dense_cap) {
    std::ostringstream os;
    os << "minimize_general: " << n << " lattice points exceeds the dense cap " << opt.dense_cap;
    throw LatticeSizeError(os.str());
  }
  const int dim = model.dim();
  Rng root(opt.seed);
  GeneralMinimizeResult best;
  best.energy = std::numeric_limits<double>::infinity();

  for (int s = 0; s < opt.starts; ++s) {
    Rng rng = root.fork(s + 1);
    MatX g(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) g(i, j) = cd(rng.normal(), rng.normal());
    g = MatX((g + g.adjoint()) / (4.0 * std::sqrt(double(dim))));
    g = clip_spectrum(g, -0.5, 0.5);

    double energy = model.energy(g);
    const double base_step = 0.25 / (model.lattice().cutoff + model.m0());
    for (int it = 0; it < opt.max_pg_iter; ++it) {
      const MatX grad = model.mean_field(g);
      double step = 4.0 * base_step;
      MatX cand;
      double cand_energy = energy;
      bool ok = false;
      for (int bt = 0; bt < 50; ++bt) {
        cand = clip_spectrum(MatX(g - step * grad), -0.5, 0.5);
        cand_energy = model.energy(cand);
        if (cand_energy <= energy + 1e-14 * std::abs(energy)) {
          ok = true;
          break;
        }
        step *= 0.5;
      }
      if (!ok) break;
      const double move = (cand - g).cwiseAbs().maxCoeff();
      g = std::move(cand);
      energy = cand_energy;
      if (move <= 1e3 * opt.tol) break;
    }
    // damped projector polish: the stationary states are spectral
    // half-sign states of their own mean field
    double res = 0.0;
    int polish = 0;
    for (; polish < opt.max_polish_iter; ++polish) {
      const MatX next = half_sign_negative(model.mean_field(g));
      res = (next - g).norm();
      g = MatX((1.0 - opt.polish_mixing) * g + opt.polish_mixing * next);
      if (res <= opt.tol) break;
    }
    energy = model.energy(g);
    best.start_energies.push_back(energy);
    if (energy < best.energy) {
      best.energy = energy;
      best.gamma = g;
      best.residual = res;
      best.iterations = polish;
    }
  }
  const int nlat = model.lattice().size();
  double offdiag = 0.0;
  for (int i = 0; i < nlat; ++i)
    for (int j = 0; j < nlat; ++j)
      if (i != j) offdiag += best.gamma.block<4, 4>(4 * i, 4 * j).squaredNorm();
  best.off_diagonal_norm = std::sqrt(offdiag);
  return best;
}

double kato_constant(double box_length, double cutoff, double mass, int max_points) {
  if (!(mass > 0.0)) throw std::invalid_argument("kato_constant: mass must be positive");
  const Lattice lat = build_lattice(box_length, cutoff, max_points);
  const PeriodicCoulomb w = periodic_coulomb(box_length);
  const int n = lat.size();
  const double L3 = std::pow(box_length, 3);

  // orbit of the octahedral group: key = sorted absolute coordinates
  std::map<std::array<int, 3>, int> orbit_of;
  std::vector<int> orbit(n);
  std::vector<std::array<int, 3>> reps;
  std::vector<double> count;
  for (int i = 0; i < n; ++i) {
    std::array<int, 3> key{std::abs(lat.coords[i][0]), std::abs(lat.coords[i][1]),
                           std::abs(lat.coords[i][2])};
    std::sort(key.begin(), key.end());
    auto [it, inserted] = orbit_of.try_emplace(key, static_cast<int>(reps.size()));
    if (inserted) {
      reps.push_back(key);
      count.push_back(0.0);
    }
    orbit[i] = it->second;
    count[it->second] += 1.0;
  }
  const int no = static_cast<int>(reps.size());
  const double h = lat.spacing();
  std::vector<double> e_point(n), e_orbit(no);
  for (int i = 0; i < n; ++i)
    e_point[i] = std::sqrt(lat.k[i].squaredNorm() + mass * mass);
  for (int o = 0; o < no; ++o) {
    const double k2 = h * h * (double(reps[o][0]) * reps[o][0] + double(reps[o][1]) * reps[o][1] +
                               double(reps[o][2]) * reps[o][2]);
    e_orbit[o] = std::sqrt(k2 + mass * mass);
  }

  // The matrix (1/L^3) What(k - l) / sqrt(E(k) E(l)) has positive entries, so
  // its top eigenvector is the symmetric one; accumulate row sums per orbit.
  Eigen::MatrixXd mo = Eigen::MatrixXd::Zero(no, no);
  parallel_for(no, worker_threads(), [&](int o) {
    const Vec3 k0(h * reps[o][0], h * reps[o][1], h * reps[o][2]);
    for (int l = 0; l < n; ++l) {
      const double wv = w.fourier_sq((k0 - lat.k[l]).squaredNorm());
      mo(o, orbit[l]) += wv / (L3 * std::sqrt(e_orbit[o] * e_point[l]));
    }
  });
  for (int o = 0; o < no; ++o)
    for (int p = 0; p < no; ++p) mo(o, p) *= count[o] / std::sqrt(count[o] * count[p]);
  mo = 0.5 * (mo + mo.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mo, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(no - 1);
}

PenalizedResult minimize_penalized(const TorusModel& model, int max_iter, double tol) {
  const auto& lat = model.lattice();
  const int n = lat.size();
  const double L = lat.box_length;
  const double L3 = std::pow(L, 3);
  const double alpha = model.alpha();
  const double mu = model.coulomb().mu;

  std::vector<Mat4> theta(n, Mat4::Zero());
  auto rho_of = [&](const std::vector<Mat4>& th) {
    double r = 0.0;
    for (const auto& t : th) r += std::real(t.trace());
    return r / L3;
  };
  auto conv = [&](const std::vector<Mat4>& th) {
    std::vector<Mat4> out(n);
    parallel_for(n, worker_threads(), [&](int i) {
      Mat4 acc = Mat4::Zero();
      for (int j = 0; j < n; ++j)
        acc += model.w_hat(lat.coords[i] - lat.coords[j]) * th[j];
      out[i] = acc;
    });
    return out;
  };
  auto energy_of = [&](const std::vector<Mat4>& th, const std::vector<Mat4>& cv) {
    double kin = 0.0, exch = 0.0;
    for (int i = 0; i < n; ++i) {
      kin += std::real((model.free_symbol(i).matrix() * th[i]).trace());
      exch += std::real((cv[i] * th[i]).trace());
    }
    const double r = rho_of(th);
    return kin + 0.5 * alpha * mu * std::pow(L, 5) * r * r - 0.5 * alpha / L3 * exch;
  };

  std::vector<Mat4> cv = conv(theta);
  double energy = energy_of(theta, cv);
  const double base_step = 0.5 / (lat.cutoff + model.m0() + alpha * mu * L * L * lat.rho_half);
  int it = 0;
  for (; it < max_iter; ++it) {
    const double r = rho_of(theta);
    std::vector<Mat4> grad(n);
    for (int i = 0; i < n; ++i)
      grad[i] = model.free_symbol(i).matrix() +
                alpha * mu * L * L * r * Mat4::Identity() - alpha / L3 * cv[i];
    double step = 8.0 * base_step;
    std::vector<Mat4> cand(n), cand_cv;
    double cand_energy = energy;
    bool ok = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (int i = 0; i < n; ++i) cand[i] = clip_spectrum(Mat4(theta[i] - step * grad[i]), 0.0, 1.0);
      cand_cv = conv(cand);
      cand_energy = energy_of(cand, cand_cv);
      if (cand_energy <= energy + 1e-15 * std::abs(energy)) {
        ok = true;
        break;
      }
      step *= 0.5;
    }
    if (!ok) break;
    double move = 0.0;
    for (int i = 0; i < n; ++i) move = std::max(move, (cand[i] - theta[i]).cwiseAbs().maxCoeff());
    theta = std::move(cand);
    cv = std::move(cand_cv);
    energy = cand_energy;
    if (move <= tol) break;
  }

  PenalizedResult out;
  out.rho = rho_of(theta);
  out.energy = energy;
  out.iterations = it + 1;
  out.kernel_bound = std::pow(2.0 * M_PI, 1.5) * out.rho;
  // sup of the kernel profile xi(x) = (2pi)^{3/2} L^-3 sum_k theta(k) e^{ikx}
  // over a deterministic sample grid (operator norm per point)
  const int g = 5;
  for (int ix = 0; ix < g; ++ix)
    for (int iy = 0; iy < g; ++iy)
      for (int iz = 0; iz < g; ++iz) {
        const Vec3 x(L * (ix + 0.5) / g - L / 2, L * (iy + 0.5) / g - L / 2,
                     L * (iz + 0.5) / g - L / 2);
        Mat4 xi = Mat4::Zero();
        for (int i = 0; i < n; ++i)
          xi += theta[i] * std::exp(cd(0.0, lat.k[i].dot(x)));
        xi *= std::pow(2.0 * M_PI, 1.5) / L3;
        Eigen::SelfAdjointEigenSolver<Mat4> es(Mat4(xi.adjoint() * xi), Eigen::EigenvaluesOnly);
        out.kernel_sup = std::max(out.kernel_sup, std::sqrt(es.eigenvalues()(3)));
      }
  out.theta = std::move(theta);
  return out;
}

}  // namespace qedvac
