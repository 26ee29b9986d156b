#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "cemsc/experiments.hpp"
#include "cemsc/util.hpp"

int main(int argc, char** argv) {
  cemsc::force_single_threaded_blas();

  CLI::App app{
      "cemsc: constraint-energy-minimizing multiscale FEM for sign-changing "
      "diffusion problems"};

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override its fields");

  cemsc::ExperimentConfig cfg;
  bool no_cache = false;
  bool no_spectra = false;
  auto* model = app.add_option("--model", cfg.model, "flat | square | cross | random");
  auto* fine_n = app.add_option("--fine-n", cfg.fine_n, "fine cells per side");
  auto* coarse = app.add_option("--coarse-n", cfg.coarse_n_list, "coarse mesh sizes")
                     ->delimiter(',');
  auto* layers = app.add_option("--layers", cfg.m_list, "oversampling layer counts")
                     ->delimiter(',');
  auto* eigs = app.add_option("--eigs", cfg.l_star, "eigenfunctions kept per element (l*)");
  auto* sp = app.add_option("--sigma-plus", cfg.sigma_plus, "positive-side coefficient");
  auto* sm = app.add_option("--sigma-minus", cfg.sigma_minus, "negative-side magnitude");
  auto* gamma = app.add_option("--gamma", cfg.gamma, "flat-interface height");
  auto* cells = app.add_option("--cells", cfg.n_cells, "periodic cells per side");
  auto* seed = app.add_option("--seed", cfg.seed, "random model seed");
  auto* count = app.add_option("--count", cfg.count, "random inclusion count");
  auto* side_lo = app.add_option("--side-lo", cfg.side_lo, "min inclusion side (fine cells)");
  auto* side_hi = app.add_option("--side-hi", cfg.side_hi, "max inclusion side (fine cells)");
  auto* source = app.add_option("--source", cfg.source, "auto | gaussian | exact");
  auto* out = app.add_option("--out", cfg.out_dir, "output directory");
  auto* threads = app.add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
  app.add_flag("--no-cache", no_cache, "disable the offline cache");
  auto* baseline = app.add_flag("--baseline", cfg.baseline, "also run the coarse Q1 baseline");
  app.add_flag("--no-spectra", no_spectra, "skip spectra.csv");
  auto* dump = app.add_flag("--dump-fields", cfg.dump_fields, "write VTK/CSV field dumps");
  auto* decay = app.add_flag("--decay", cfg.decay, "run the basis decay study");
  auto* decay_c = app.add_option("--decay-coarse-n", cfg.decay_coarse_n, "decay study coarse mesh");
  auto* decay_e = app.add_option("--decay-elem", cfg.decay_elem, "decay study element (-1: (1,1))");
  auto* decay_m = app.add_option("--decay-m-ref", cfg.decay_m_ref, "decay study reference layers");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) {
      cemsc::ExperimentConfig file_cfg = cemsc::ExperimentConfig::from_json_file(config_path);
      // CLI flags beat config-file fields.
      if (!*model) cfg.model = file_cfg.model;
      if (!*fine_n) cfg.fine_n = file_cfg.fine_n;
      if (!*coarse) cfg.coarse_n_list = file_cfg.coarse_n_list;
      if (!*layers) cfg.m_list = file_cfg.m_list;
      if (!*eigs) cfg.l_star = file_cfg.l_star;
      if (!*sp) cfg.sigma_plus = file_cfg.sigma_plus;
      if (!*sm) cfg.sigma_minus = file_cfg.sigma_minus;
      if (!*gamma) cfg.gamma = file_cfg.gamma;
      if (!*cells) cfg.n_cells = file_cfg.n_cells;
      if (!*seed) cfg.seed = file_cfg.seed;
      if (!*count) cfg.count = file_cfg.count;
      if (!*side_lo) cfg.side_lo = file_cfg.side_lo;
      if (!*side_hi) cfg.side_hi = file_cfg.side_hi;
      if (!*source) cfg.source = file_cfg.source;
      if (!*out) cfg.out_dir = file_cfg.out_dir;
      if (!no_cache) cfg.use_cache = file_cfg.use_cache;
      if (!*threads) cfg.threads = file_cfg.threads;
      if (!*baseline) cfg.baseline = file_cfg.baseline;
      if (!no_spectra) cfg.spectra = file_cfg.spectra;
      if (!*dump) cfg.dump_fields = file_cfg.dump_fields;
      if (!*decay) cfg.decay = file_cfg.decay;
      if (!*decay_c) cfg.decay_coarse_n = file_cfg.decay_coarse_n;
      if (!*decay_e) cfg.decay_elem = file_cfg.decay_elem;
      if (!*decay_m) cfg.decay_m_ref = file_cfg.decay_m_ref;
    }
    if (no_cache) cfg.use_cache = false;
    if (no_spectra) cfg.spectra = false;
    return cemsc::run_experiment(cfg);
  } catch (const cemsc::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
