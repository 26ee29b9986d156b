#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cemsc {

/// One experiment sweep: a coefficient model, a list of coarse meshes and
/// oversampling layer counts, and the output/caching knobs. Mirrors the CLI
/// flags and the JSON config schema one to one.
struct ExperimentConfig {
  std::string model = "square";  // flat | square | cross | random
  int fine_n = 400;
  std::vector<int> coarse_n_list = {10, 20, 40, 80};
  std::vector<int> m_list = {1, 2, 3, 4};
  int l_star = 3;
  double sigma_plus = 1.0;
  double sigma_minus = 0.1;  // magnitude of the negative-side coefficient
  double gamma = 0.5;        // flat model interface height
  int n_cells = 10;          // periodic models
  std::uint64_t seed = 1;    // random model
  int count = 60;
  int side_lo = 8;
  int side_hi = 24;
  std::string source = "auto";  // auto | gaussian | exact
  std::string out_dir = "out";
  bool use_cache = true;
  int threads = 0;  // 0 = hardware concurrency
  bool baseline = false;
  bool spectra = true;
  bool dump_fields = false;
  bool decay = false;
  int decay_coarse_n = 10;
  int decay_elem = -1;  // -1 picks coarse element (1,1)
  int decay_m_ref = 8;

  void validate() const;  // throws ConfigError
  static ExperimentConfig from_json_file(const std::string& path);
  static ExperimentConfig from_json_text(const std::string& text);
};

/// Runs the sweep, writing errors.csv (one row per (H, m)), spectra.csv,
/// baseline.csv and decay.csv when requested, plus optional VTK/CSV dumps.
/// Returns 0 on success, 1 on validation errors, 2 when every sweep point
/// failed numerically.
int run_experiment(const ExperimentConfig& config);

}  // namespace cemsc
