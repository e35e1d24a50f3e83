#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fracdeg/cantor.hpp"
#include "fracdeg/point.hpp"

namespace fracdeg {

// One reproducible desk experiment: every run writes its outputs plus a
// manifest (full config echo and checksums), so a config replays the run
// byte for byte at a fixed thread count.
struct ExperimentConfig {
  std::string command;
  std::string map_name = "id";  // builtin test map, or "lusin-n"/"orientation"
  CantorMapSpec cantor = CantorMapSpec::lusin_n(2, 0.5, 6);
  bool use_cantor = false;

  std::vector<int> levels = {2, 4, 6, 8};  // cn-stability
  int resolution = 256;                    // sampling grid subdivisions
  int raster = 512;                        // pixels per axis for PGM output
  double s = 0.5;
  double p = 2.0;
  std::string method = "grid";  // seminorm backend
  std::vector<double> target = {0.0, 0.0};      // y for degree/preimages
  std::vector<double> point = {0.25, 0.25};     // x for evaluate
  std::vector<double> u_spec = {0.0, 0.0, 0.75};  // center..., radius for verify-cn
  std::vector<double> psi = {0.2, -0.1, 0.3};    // center..., radius for cov-check
  double epsilon = 0.1;  // preimages ball size
  std::uint64_t seed = 1;
  int threads = 1;
  std::filesystem::path out_dir = "out";

  std::string echo() const;  // key=value dump for the manifest
};

// Runs one experiment, writes CSV/PGM outputs and the run manifest into
// out_dir.  Returns the process exit status (0 also for inconclusive
// verdicts, which are data, not failures).
int run_experiment(const ExperimentConfig& config);

std::shared_ptr<Mapping> resolve_map(const ExperimentConfig& config);

}  // namespace fracdeg
