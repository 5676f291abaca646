// Flat key-value run configuration with dotted sections:
//   physical.alpha = 1.0
//   sweep.L = [8, 16, 24]
// '#' starts a comment. Unknown keys are rejected.
#pragma once

#include "qedvac/errors.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qedvac {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class RunConfig {
 public:
  static RunConfig parse_file(const std::string& path);
  static RunConfig parse_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  uint64_t get_u64(const std::string& key, uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_list(const std::string& key) const;  // empty if absent

  const std::map<std::string, std::string>& raw() const { return values_; }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  /// Domain checks shared by every experiment: coupling window, positive
  /// tolerances and sizes. Throws ConfigError.
  void validate() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace qedvac
