#include "qedvac/run.hpp"

#include "qedvac/bdf.hpp"
#include "qedvac/free_vacuum.hpp"
#include "qedvac/util.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace qedvac {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot hash missing file " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.good()) {
    in.read(buf, sizeof(buf));
    EVP_DigestUpdate(ctx, buf, in.gcount());
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

// Comma-separated, '.' decimal, 17 significant digits, LF endings.
class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header)
      : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open " + path.string());
    for (size_t i = 0; i < header.size(); ++i) {
      if (i) out_ << ',';
      out_ << header[i];
    }
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    for (size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ',';
      out_ << format_value(values[i]);
    }
    out_ << '\n';
  }

  void row_mixed(const std::vector<std::string>& values) {
    for (size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ',';
      out_ << values[i];
    }
    out_ << '\n';
  }

  const fs::path& path() const { return path_; }
  void close() { out_.close(); }

 private:
  fs::path path_;
  std::ofstream out_;
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

class Manifest {
 public:
  Manifest(const std::string& experiment, const RunConfig& cfg, uint64_t seed, int threads) {
    j_["version"] = kVersion;
    j_["experiment"] = experiment;
    j_["created_utc"] = utc_now();
    j_["seed"] = seed;
    j_["threads"] = threads;
    json cfgj = json::object();
    for (const auto& [k, v] : cfg.raw()) cfgj[k] = v;
    j_["config"] = cfgj;
    j_["experiments"] = json::array();
    j_["flags"] = json::array();
    j_["files"] = json::array();
  }

  json& summary(const std::string& name) {
    for (auto& e : j_["experiments"])
      if (e["name"] == name) return e;
    json e;
    e["name"] = name;
    e["converged"] = true;
    e["scalars"] = json::object();
    j_["experiments"].push_back(e);
    return j_["experiments"].back();
  }

  void flag(const std::string& text) { j_["flags"].push_back(text); }

  void add_file(const fs::path& p) { files_.push_back(p); }

  void write(const fs::path& dir) {
    for (const auto& p : files_) {
      json f;
      f["name"] = p.filename().string();
      f["bytes"] = static_cast<uint64_t>(fs::file_size(p));
      f["sha256"] = sha256_file(p);
      j_["files"].push_back(f);
    }
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    out << j_.dump(2) << '\n';
  }

 private:
  json j_;
  std::vector<fs::path> files_;
};

std::shared_ptr<const ExternalDensity> make_density(const RunConfig& cfg) {
  const std::string fam = cfg.get_string("density.family", "none");
  if (fam == "none") return nullptr;
  if (fam == "gaussian")
    return std::make_shared<ExternalDensity>(ExternalDensity::gaussian(
        cfg.get_double("density.Z", 1.0), cfg.get_double("density.sigma", 1.0)));
  if (fam == "point")
    return std::make_shared<ExternalDensity>(
        ExternalDensity::point_charge(cfg.get_double("density.Z", 1.0)));
  return std::make_shared<ExternalDensity>(
      ExternalDensity::tabulated_from_file(cfg.get_string("density.file", "")));
}

FreeVacuumParams params_of(const RunConfig& cfg) {
  return FreeVacuumParams{cfg.get_double("physical.m0", 1.0),
                          cfg.get_double("physical.alpha", 0.0),
                          cfg.get_double("physical.cutoff", 1.0)};
}

FreeVacuumOptions solver_options(const RunConfig& cfg, int threads) {
  FreeVacuumOptions opt;
  opt.grid_points = cfg.get_int("solver.grid_points", 200);
  opt.panel_points = cfg.get_int("solver.panel_points", 256);
  opt.mixing = cfg.get_double("solver.mixing", 0.5);
  opt.tol = cfg.get_double("solver.tolerance", 1e-10);
  opt.max_iter = cfg.get_int("solver.max_iter", 500);
  opt.threads = threads;
  return opt;
}

void write_invariant_report(const fs::path& dir, Manifest& man, const InvariantReport& rep,
                            const std::string& tag) {
  CsvWriter csv(dir / ("invariants_" + tag + ".csv"),
                {"name", "pass", "margin", "scale", "node"});
  for (const auto& item : rep.items) {
    csv.row_mixed({'"' + item.name + '"', item.pass ? "1" : "0", format_value(item.margin),
                   format_value(item.scale), std::to_string(item.node)});
  }
  csv.close();
  man.add_file(csv.path());
}

void write_profile(const fs::path& dir, Manifest& man, const FreeVacuumSolution& sol,
                   const std::string& tag) {
  CsvWriter csv(dir / ("profile_" + tag + ".csv"), {"r", "f0", "f1", "g0", "g1"});
  for (int i = 0; i < sol.profile.grid.size(); ++i)
    csv.row({sol.profile.grid.r[i], sol.profile.f0[i], sol.profile.f1[i], sol.mean_field.g0[i],
             sol.mean_field.g1[i]});
  csv.close();
  man.add_file(csv.path());
}

int run_free_vacuum(const RunConfig& cfg, const fs::path& dir, Manifest& man, int threads) {
  const FreeVacuumParams p = params_of(cfg);
  const FreeVacuumOptions opt = solver_options(cfg, threads);
  const FreeVacuumSolution sol = solve_free_vacuum(p, opt);
  const double g00 = mean_field_at_zero(sol.mean_field);
  const double bound = mass_divergence_bound(p);

  CsvWriter csv(dir / "free_vacuum.csv",
                {"m0", "alpha", "cutoff", "grid_points", "energy", "residual", "iterations",
                 "g0_at_zero", "mass_bound", "margin"});
  csv.row({p.m0, p.alpha, p.cutoff, double(opt.grid_points), sol.energy, sol.residual,
           double(sol.iterations), g00, bound, g00 - bound});
  csv.close();
  man.add_file(csv.path());
  write_profile(dir, man, sol, "free_vacuum");

  auto& sum = man.summary("free-vacuum");
  sum["iterations"] = sol.iterations;
  sum["residual"] = sol.residual;
  sum["scalars"]["energy"] = sol.energy;
  sum["scalars"]["g0_at_zero"] = g00;

  if (cfg.get_bool("checks.invariants", true)) {
    const InvariantReport rep = verify_free_vacuum(sol);
    write_invariant_report(dir, man, rep, "free_vacuum");
    sum["scalars"]["invariants_pass"] = rep.all_pass;
    if (!rep.all_pass) {
      std::cerr << "invariant check failed:\n";
      for (const auto& item : rep.items)
        if (!item.pass)
          std::cerr << "  " << item.name << " margin " << item.margin << " at node " << item.node
                    << "\n";
      return 4;
    }
  }
  return 0;
}

int run_renorm(const RunConfig& cfg, const fs::path& dir, Manifest& man, int threads) {
  std::vector<double> cutoffs = cfg.get_list("sweep.cutoff");
  if (cutoffs.empty()) throw ConfigError("renorm: sweep.cutoff list is required");
  if (!std::is_sorted(cutoffs.begin(), cutoffs.end()))
    throw ConfigError("renorm: sweep.cutoff must be ascending");
  FreeVacuumParams p = params_of(cfg);
  CsvWriter csv(dir / "renorm.csv", {"cutoff", "g0_at_zero", "lower_bound", "margin"});
  bool increasing = true, nonneg = true;
  double prev = -std::numeric_limits<double>::infinity();
  auto& sum = man.summary("renorm");
  for (double lam : cutoffs) {
    p.cutoff = lam;
    const FreeVacuumSolution sol = solve_free_vacuum(p, solver_options(cfg, threads));
    const double g00 = mean_field_at_zero(sol.mean_field);
    const double bound = mass_divergence_bound(p);
    csv.row({lam, g00, bound, g00 - bound});
    increasing = increasing && (g00 > prev || p.alpha == 0.0);
    nonneg = nonneg && (g00 - bound >= -1e-10 * bound);
    prev = g00;
  }
  csv.close();
  man.add_file(csv.path());
  sum["scalars"]["monotone"] = increasing;
  sum["scalars"]["bound_satisfied"] = nonneg;
  if (!increasing || !nonneg) {
    std::cerr << "renorm: divergence diagnostic failed (monotone=" << increasing
              << ", bound=" << nonneg << ")\n";
    return 4;
  }
  return 0;
}

int run_torus(const RunConfig& cfg, const fs::path& dir, Manifest& man, int threads) {
  std::vector<double> ls = cfg.get_list("sweep.L");
  if (ls.empty()) throw ConfigError("torus: sweep.L list is required");
  if (!std::is_sorted(ls.begin(), ls.end())) throw ConfigError("torus: sweep.L must be ascending");
  const FreeVacuumParams p = params_of(cfg);
  const int max_points = cfg.get_int("lattice.max_points", 4096);
  auto density = make_density(cfg);

  // continuum reference
  const FreeVacuumSolution cont = solve_free_vacuum(p, solver_options(cfg, threads));
  PchipInterpolant f0_itp(cont.profile.grid.r, cont.profile.f0);
  PchipInterpolant f1_itp(cont.profile.grid.r, cont.profile.f1);

  TorusSolveOptions topt;
  topt.mixing = cfg.get_double("solver.mixing", 0.5);
  topt.tol = cfg.get_double("solver.tolerance", 1e-10);
  topt.max_iter = cfg.get_int("solver.max_iter", 500);
  topt.threads = threads;

  std::vector<std::string> header = {"L",       "points",  "energy_per_volume",
                                     "continuum_energy", "abs_gap", "sup_f_diff"};
  const bool with_field = density != nullptr;
  if (with_field) {
    header.insert(header.end(),
                  {"energy_external", "difference", "bdf_minimum", "consistency_gap"});
  }
  CsvWriter csv(dir / "torus.csv", header);
  const bool penalized = cfg.get_bool("torus.penalized", false);
  std::unique_ptr<CsvWriter> pen;
  if (penalized)
    pen = std::make_unique<CsvWriter>(
        dir / "penalized.csv",
        std::vector<std::string>{"L", "points", "rho", "rho_times_L", "energy", "kernel_sup",
                                 "kernel_bound"});

  std::vector<double> gaps;
  auto& sum = man.summary("torus");
  for (double L : ls) {
    Lattice lat = build_lattice(L, p.cutoff, max_points);
    TorusModel model(lat, p.m0, p.alpha, nullptr);
    const TISolveResult ti = solve_torus_ti(model, topt);
    double supf = 0.0;
    for (int i = 0; i < lat.size(); ++i) {
      const double kn = lat.k[i].norm();
      const double fb0 = f0_itp(kn);
      const double fb1 = kn > 1e-12 ? f1_itp(kn) : 0.0;
      const Vec3 ab = kn > 1e-12 ? Vec3(lat.k[i] / kn * fb1) : Vec3(0, 0, 0);
      supf = std::max(supf, (ti.state.f[i].a - ab).cwiseAbs().maxCoeff());
      supf = std::max(supf, std::abs(ti.state.f[i].b - fb0));
    }
    const double gap = std::abs(ti.energy_per_volume - cont.energy);
    gaps.push_back(gap);
    std::vector<double> row = {L, double(lat.size()), ti.energy_per_volume, cont.energy, gap,
                               supf};
    if (with_field) {
      ThermoDifferenceOptions topts;
      topts.general.dense_cap = cfg.get_int("lattice.dense_cap", 15);
      topts.general.starts = cfg.get_int("torus.general_starts", 8);
      topts.general.seed = cfg.get_u64("solver.seed", 1);
      topts.bdf.mixing = cfg.get_double("bdf.mixing", 0.3);
      topts.bdf.tol = cfg.get_double("bdf.tolerance", 1e-8);
      topts.bdf.max_iter = cfg.get_int("bdf.max_iter", 300);
      topts.reference = topt;
      const auto rows = thermo_difference(p.m0, p.alpha, p.cutoff, density, {L}, topts);
      row.insert(row.end(), {rows[0].energy_external, rows[0].difference, rows[0].bdf_minimum,
                             rows[0].consistency_gap});
    }
    csv.row(row);
    if (penalized) {
      const PenalizedResult pr = minimize_penalized(model);
      pen->row({L, double(lat.size()), pr.rho, pr.rho * L, pr.energy, pr.kernel_sup,
                pr.kernel_bound});
    }
  }
  csv.close();
  man.add_file(csv.path());
  if (pen) {
    pen->close();
    man.add_file(pen->path());
  }
  // convergence trend over the last three boxes
  if (gaps.size() >= 3) {
    const size_t n = gaps.size();
    if (!(gaps[n - 1] <= gaps[n - 2] && gaps[n - 2] <= gaps[n - 3]))
      man.flag("torus: |E_L/L^3 - E| not non-increasing over the last three L");
  }
  sum["scalars"]["continuum_energy"] = cont.energy;
  sum["scalars"]["last_gap"] = gaps.back();
  return 0;
}

int run_kato(const RunConfig& cfg, const fs::path& dir, Manifest& man, int) {
  std::vector<double> ls = cfg.get_list("sweep.L");
  if (ls.empty()) throw ConfigError("kato: sweep.L list is required");
  const double cutoff = cfg.get_double("physical.cutoff", 10.0);
  const double mass = cfg.get_double("kato.mass", cfg.get_double("physical.m0", 1.0));
  const int max_points = cfg.get_int("lattice.max_points", 200000);
  CsvWriter csv(dir / "kato.csv", {"L", "points", "kato_constant", "diff_prev"});
  std::vector<double> vals;
  for (double L : ls) {
    const Lattice lat = build_lattice(L, cutoff, max_points);
    const double c = kato_constant(L, cutoff, mass, max_points);
    csv.row({L, double(lat.size()), c,
             vals.empty() ? 0.0 : std::abs(c - vals.back())});
    vals.push_back(c);
  }
  csv.close();
  man.add_file(csv.path());
  auto& sum = man.summary("kato");
  if (vals.size() >= 2) {
    const size_t n = vals.size();
    const double l1 = ls[n - 2], l2 = ls[n - 1];
    const double extrap = (l2 * vals[n - 1] - l1 * vals[n - 2]) / (l2 - l1);
    sum["scalars"]["extrapolated"] = extrap;
    sum["scalars"]["half_pi"] = M_PI / 2.0;
    if (extrap > M_PI / 2.0 + 1e-6) {
      std::cerr << "kato: extrapolated constant " << extrap << " exceeds pi/2\n";
      return 4;
    }
  }
  return 0;
}

int run_bdf(const RunConfig& cfg, const fs::path& dir, Manifest& man, int) {
  const FreeVacuumParams p = params_of(cfg);
  auto density = make_density(cfg);
  const double L = cfg.get_double("lattice.L", 6.0);
  const int max_points = cfg.get_int("lattice.max_points", 4096);

  TorusSolveOptions ropt;
  ropt.tol = cfg.get_double("solver.tolerance", 1e-11);
  ropt.max_iter = cfg.get_int("solver.max_iter", 500);

  PolarizedVacuumOptions popt;
  popt.mixing = cfg.get_double("bdf.mixing", 0.3);
  popt.tol = cfg.get_double("bdf.tolerance", 1e-8);
  popt.max_iter = cfg.get_int("bdf.max_iter", 300);

  Lattice lat = build_lattice(L, p.cutoff, max_points);
  TorusModel model(lat, p.m0, p.alpha, density);
  BdfModel bdf(model, ropt);
  const PolarizedVacuumResult pv = solve_polarized_vacuum(bdf, popt);

  const double dnn_lat = model.density_self_energy();
  const double cnorm = density ? density->coulomb_norm(p.cutoff) : 0.0;
  const UniquenessCheck uc = uniqueness_condition_check(p.alpha, cnorm);
  const double pg = bdf.projected_gradient_norm(pv.q);

  CsvWriter csv(dir / "bdf.csv",
                {"L", "points", "m0", "alpha", "coulomb_norm", "d_nn_lattice", "energy",
                 "bracket_low", "residual", "iterations", "p0_trace", "gap", "pg_norm",
                 "uniqueness_middle", "uniqueness_pass"});
  csv.row({L, double(lat.size()), p.m0, p.alpha, cnorm, dnn_lat, pv.energy,
           -0.5 * p.alpha * dnn_lat, pv.residual, double(pv.iterations), pv.p0_trace, pv.gap, pg,
           uc.middle, uc.pass ? 1.0 : 0.0});
  csv.close();
  man.add_file(csv.path());

  auto& sum = man.summary("bdf");
  sum["iterations"] = pv.iterations;
  sum["residual"] = pv.residual;
  sum["scalars"]["energy"] = pv.energy;
  sum["scalars"]["p0_trace"] = pv.p0_trace;

  const std::vector<double> ls = cfg.get_list("sweep.L");
  if (!ls.empty()) {
    ThermoDifferenceOptions topts;
    topts.general.dense_cap = cfg.get_int("lattice.dense_cap", 15);
    topts.general.starts = cfg.get_int("torus.general_starts", 8);
    topts.general.seed = cfg.get_u64("solver.seed", 1);
    topts.bdf = popt;
    topts.reference = ropt;
    const auto rows = thermo_difference(p.m0, p.alpha, p.cutoff, density, ls, topts);
    CsvWriter tcsv(dir / "thermo_difference.csv",
                   {"L", "points", "energy_external", "energy_free", "difference", "bdf_minimum",
                    "consistency_gap"});
    for (const auto& r : rows)
      tcsv.row({r.box_length, double(r.points), r.energy_external, r.energy_free, r.difference,
                r.bdf_minimum, r.consistency_gap});
    tcsv.close();
    man.add_file(tcsv.path());
    if (rows.size() >= 2) {
      const auto& a = rows[rows.size() - 2];
      const auto& b = rows.back();
      if (std::abs(b.difference - rows.front().difference) >
          std::abs(a.difference - rows.front().difference))
        man.flag("bdf: thermo difference trend reversed on the last step");
    }
  }

  // the fixed point must sit inside the admissible bracket when a field is on
  if (density && (pv.energy > 1e-10 || pv.energy < -0.5 * p.alpha * dnn_lat - 1e-10)) {
    std::cerr << "bdf: minimum " << pv.energy << " outside [" << -0.5 * p.alpha * dnn_lat
              << ", 0]\n";
    return 4;
  }
  return 0;
}

int run_oracle_check(const RunConfig& cfg, const fs::path& dir, Manifest& man, int) {
  const FreeVacuumParams p = params_of(cfg);
  const uint64_t seed = cfg.get_u64("solver.seed", 1);
  Rng rng(seed);

  // angular reduction battery
  const RadialGrid grid = RadialGrid::gauss(64, p.cutoff);
  CsvWriter acsv(dir / "oracle_angular.csv", {"case", "j", "r", "transform", "oracle", "rel_err"});
  double worst_ang = 0.0;
  for (int t = 0; t < 20; ++t) {
    const int j = t % 2;
    const double r = rng.uniform(0.05 * p.cutoff, p.cutoff);
    const double c0 = rng.normal(), c1 = rng.normal(), c2 = rng.normal();
    RadialFunction h{grid, {}};
    h.values.resize(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
      const double t1 = grid.r[i] / p.cutoff;
      h.values[i] = -(1.2 + std::tanh(c0) + 0.5 * std::sin(c1 + 2.0 * t1) + 0.2 * c2 * t1);
    }
    const double xf = exchange_transform(j, h, r, 1.0);
    const double oc = angular_reduction_oracle(j, h, Vec3(0, 0, r), 1.0);
    const double rel = std::abs(xf - oc) / (std::abs(oc) + 1e-12);
    worst_ang = std::max(worst_ang, rel);
    acsv.row({double(t), double(j), r, xf, oc, rel});
  }
  acsv.close();
  man.add_file(acsv.path());

  // lattice gradient battery: directional finite differences of the energy
  // against the assembled mean field
  Lattice lat = build_lattice(2.0 * M_PI, 1.2, 64);
  auto density = make_density(cfg);
  TorusModel model(lat, p.m0, std::min(p.alpha, 1.0), density);
  const int dim = model.dim();
  CsvWriter gcsv(dir / "oracle_gradient.csv", {"case", "fd", "assembled", "rel_err"});
  double worst_grad = 0.0;
  for (int t = 0; t < 20; ++t) {
    MatX g(dim, dim), hdir(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int jj = 0; jj < dim; ++jj) {
        g(i, jj) = std::complex<double>(rng.normal(), rng.normal());
        hdir(i, jj) = std::complex<double>(rng.normal(), rng.normal());
      }
    g = MatX((g + g.adjoint()) / (8.0 * std::sqrt(double(dim))));
    hdir = MatX((hdir + hdir.adjoint()) / (2.0 * std::sqrt(double(dim))));
    const double eps = 1e-5;
    const double fd =
        (model.energy(MatX(g + eps * hdir)) - model.energy(MatX(g - eps * hdir))) / (2.0 * eps);
    const double as = std::real((model.mean_field(g) * hdir).trace());
    const double rel = std::abs(fd - as) / (std::abs(as) + 1e-12);
    worst_grad = std::max(worst_grad, rel);
    gcsv.row({double(t), fd, as, rel});
  }
  gcsv.close();
  man.add_file(gcsv.path());

  auto& sum = man.summary("oracle-check");
  sum["scalars"]["worst_angular_rel_err"] = worst_ang;
  sum["scalars"]["worst_gradient_rel_err"] = worst_grad;
  if (worst_ang > 1e-4 || worst_grad > 1e-6) {
    std::cerr << "oracle-check: angular " << worst_ang << " (tol 1e-4), gradient " << worst_grad
              << " (tol 1e-6)\n";
    return 4;
  }
  return 0;
}

int run_verify(const RunConfig& cfg, const fs::path& dir, Manifest& man, int) {
  (void)dir;
  const fs::path target = cfg.get_string("verify.target", "");
  if (target.empty()) throw ConfigError("verify: verify.target is required");
  std::ifstream in(target / "manifest.json");
  if (!in) throw ConfigError("verify: no manifest.json under " + target.string());
  json m = json::parse(in);
  bool ok = true;
  for (const auto& f : m["files"]) {
    const fs::path p = target / f["name"].get<std::string>();
    if (!fs::exists(p)) {
      std::cerr << "verify: missing file " << p << "\n";
      ok = false;
      continue;
    }
    const std::string h = sha256_file(p);
    if (h != f["sha256"].get<std::string>()) {
      std::cerr << "verify: hash mismatch for " << p << "\n";
      ok = false;
    }
  }
  // re-check stored free-vacuum invariants when the profile table is present
  const fs::path prof = target / "profile_free_vacuum.csv";
  if (fs::exists(prof) && m["config"].contains("physical.m0")) {
    std::ifstream pin(prof);
    std::string line;
    std::getline(pin, line);  // header
    std::vector<double> r, f0, f1, g0, g1;
    while (std::getline(pin, line)) {
      double a, b, c, d, e;
      if (std::sscanf(line.c_str(), "%lg,%lg,%lg,%lg,%lg", &a, &b, &c, &d, &e) == 5) {
        r.push_back(a);
        f0.push_back(b);
        f1.push_back(c);
        g0.push_back(d);
        g1.push_back(e);
      }
    }
    FreeVacuumSolution sol;
    sol.params.m0 = std::stod(m["config"]["physical.m0"].get<std::string>());
    sol.params.alpha = std::stod(m["config"].value("physical.alpha", std::string("0")));
    sol.params.cutoff = std::stod(m["config"].value("physical.cutoff", std::string("1")));
    RadialGrid grid{r, std::vector<double>(r.size(), 0.0), r.empty() ? 1.0 : r.back()};
    sol.profile = RadialProfile{grid, f0, f1};
    sol.mean_field = MeanFieldRadial{grid, g0, g1};
    const InvariantReport rep = verify_free_vacuum(sol);
    if (!rep.all_pass) {
      for (const auto& item : rep.items)
        if (!item.pass)
          std::cerr << "verify: invariant '" << item.name << "' fails with margin " << item.margin
                    << "\n";
      ok = false;
    }
  }
  auto& sum = man.summary("verify");
  sum["scalars"]["target"] = target.string();
  sum["scalars"]["ok"] = ok;
  return ok ? 0 : 4;
}

}  // namespace

int run(const RunRequest& req, const RunConfig& cfg) {
  try {
    cfg.validate();
    const fs::path dir = !req.out_dir.empty()
                             ? fs::path(req.out_dir)
                             : fs::path(cfg.get_string("output.dir", "out"));
    fs::create_directories(dir);
    const uint64_t seed = req.seed_overridden ? req.seed : cfg.get_u64("solver.seed", 1);
    set_worker_threads(req.threads);
    RunConfig effective = cfg;
    effective.set("solver.seed", std::to_string(seed));

    Manifest man(req.experiment, effective, seed, req.threads);
    int code = 0;
    try {
      if (req.experiment == "free-vacuum")
        code = run_free_vacuum(effective, dir, man, req.threads);
      else if (req.experiment == "renorm")
        code = run_renorm(effective, dir, man, req.threads);
      else if (req.experiment == "torus")
        code = run_torus(effective, dir, man, req.threads);
      else if (req.experiment == "kato")
        code = run_kato(effective, dir, man, req.threads);
      else if (req.experiment == "bdf")
        code = run_bdf(effective, dir, man, req.threads);
      else if (req.experiment == "oracle-check")
        code = run_oracle_check(effective, dir, man, req.threads);
      else if (req.experiment == "verify")
        code = run_verify(effective, dir, man, req.threads);
      else
        throw ConfigError("unknown experiment '" + req.experiment + "'");
    } catch (const NonConvergenceError& e) {
      std::cerr << "solver did not converge: " << e.what() << "\n";
      auto& sum = man.summary(req.experiment);
      sum["converged"] = false;
      sum["error"] = e.what();
      man.write(dir);
      return 3;
    }
    man.write(dir);
    return code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 2;
  } catch (const LatticeSizeError& e) {
    std::cerr << "lattice size error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int run(const RunRequest& req) {
  try {
    const RunConfig cfg = RunConfig::parse_file(req.config_path);
    return run(req, cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace qedvac
