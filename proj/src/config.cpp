#include "qedvac/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace qedvac {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "experiment",
      "physical.m0", "physical.alpha", "physical.cutoff",
      "solver.grid_points", "solver.panel_points", "solver.mixing", "solver.tolerance",
      "solver.max_iter", "solver.seed", "solver.direct_starts",
      "sweep.L", "sweep.cutoff", "sweep.lambda",
      "lattice.L", "lattice.max_points", "lattice.dense_cap",
      "torus.penalized", "torus.general_starts",
      "density.family", "density.Z", "density.sigma", "density.file",
      "bdf.mixing", "bdf.tolerance", "bdf.max_iter",
      "kato.mass",
      "checks.invariants",
      "output.dir",
      "verify.target",
  };
  return keys;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' is not a number: '" + v + "'");
  }
}

}  // namespace

RunConfig RunConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

RunConfig RunConfig::parse_string(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
    if (!known_keys().count(key))
      throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (cfg.values_.count(key))
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    cfg.values_[key] = value;
  }
  return cfg;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_double(key, it->second);
}

int RunConfig::get_int(const std::string& key, int fallback) const {
  const double x = get_double(key, fallback);
  if (x != static_cast<int>(x)) throw ConfigError("config: key '" + key + "' must be an integer");
  return static_cast<int>(x);
}

uint64_t RunConfig::get_u64(const std::string& key, uint64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' is not an unsigned integer");
  }
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::string v = it->second;
  std::transform(v.begin(), v.end(), v.begin(), ::tolower);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: key '" + key + "' is not a boolean: '" + it->second + "'");
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::vector<double> RunConfig::get_list(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return {};
  std::string v = trim(it->second);
  if (v.size() < 2 || v.front() != '[' || v.back() != ']')
    throw ConfigError("config: key '" + key + "' must be a bracketed list");
  v = v.substr(1, v.size() - 2);
  std::vector<double> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw ConfigError("config: key '" + key + "' is an empty list");
  return out;
}

void RunConfig::validate() const {
  const double alpha = get_double("physical.alpha", 0.0);
  if (alpha < 0.0 || alpha >= kMaxCoupling) {
    std::ostringstream os;
    os << "config: physical.alpha = " << alpha
       << " violates the admissible coupling window 0 <= alpha < 4/pi (" << kMaxCoupling << ")";
    throw ConfigError(os.str());
  }
  if (!(get_double("physical.m0", 1.0) > 0.0))
    throw ConfigError("config: physical.m0 must be positive");
  if (!(get_double("physical.cutoff", 1.0) > 0.0))
    throw ConfigError("config: physical.cutoff must be positive");
  for (const char* key : {"solver.tolerance", "bdf.tolerance"}) {
    if (has(key) && !(get_double(key, 1.0) > 0.0))
      throw ConfigError(std::string("config: ") + key + " must be positive");
  }
  for (const char* key : {"solver.mixing", "bdf.mixing"}) {
    const double v = get_double(key, 0.5);
    if (!(v > 0.0) || v > 1.0)
      throw ConfigError(std::string("config: ") + key + " must lie in (0, 1]");
  }
  if (has("density.family")) {
    const std::string f = get_string("density.family", "");
    if (f != "gaussian" && f != "point" && f != "tabulated" && f != "none")
      throw ConfigError("config: density.family must be gaussian, point, tabulated or none");
    if (f == "tabulated" && !has("density.file"))
      throw ConfigError("config: density.family = tabulated requires density.file");
  }
}

}  // namespace qedvac
