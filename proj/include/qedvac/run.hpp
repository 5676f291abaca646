// Experiment orchestration behind the CLI: builds solvers from a RunConfig,
// writes CSV tables and a manifest with content hashes, and maps failures to
// the exit-code contract (0 ok, 2 config, 3 non-convergence, 4 invariant).
#pragma once

#include "qedvac/config.hpp"

#include <cstdint>
#include <string>

namespace qedvac {

inline const char* kVersion = "0.1.0";

struct RunRequest {
  std::string experiment;  // free-vacuum | torus | bdf | kato | renorm | oracle-check | verify
  std::string config_path;
  std::string out_dir;       // empty: from config output.dir, else "out"
  uint64_t seed = 0;         // 0: from config solver.seed
  bool seed_overridden = false;
  int threads = 1;
};

int run(const RunRequest& req);

/// Same entry with an already-parsed config (tests drive this directly).
int run(const RunRequest& req, const RunConfig& cfg);

}  // namespace qedvac
