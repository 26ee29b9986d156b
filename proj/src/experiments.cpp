#include "cemsc/experiments.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "cemsc/assembly.hpp"
#include "cemsc/auxspace.hpp"
#include "cemsc/cem.hpp"
#include "cemsc/coeff.hpp"
#include "cemsc/grid.hpp"
#include "cemsc/io.hpp"
#include "cemsc/metrics.hpp"
#include "cemsc/online.hpp"

namespace cemsc {

namespace {

using nlohmann::json;

double now_ms() {
  using namespace std::chrono;
  return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

std::string csv_escape_status(const std::string& s) {
  std::string out;
  for (char c : s) out += (c == ',' || c == '\n') ? ';' : c;
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (model != "flat" && model != "square" && model != "cross" && model != "random")
    throw ConfigError("config: unknown model '" + model + "'");
  if (fine_n < 2) throw ConfigError("config: fine_n too small");
  if (coarse_n_list.empty()) throw ConfigError("config: coarse_n list is empty");
  if (m_list.empty()) throw ConfigError("config: layers list is empty");
  if (l_star < 1) throw ConfigError("config: eigs must be at least 1");
  for (int c : coarse_n_list) {
    if (c < 2 || fine_n % c != 0)
      throw ConfigError("config: coarse_n " + std::to_string(c) +
                        " does not nest in fine_n " + std::to_string(fine_n));
  }
  for (int m : m_list)
    if (m < 0) throw ConfigError("config: negative oversampling layer count");
  if (!(sigma_plus > 0.0 && sigma_minus > 0.0))
    throw ConfigError("config: sigma magnitudes must be positive");
  if (model == "flat" && !(gamma > 0.0 && gamma < 1.0))
    throw ConfigError("config: gamma must lie in (0,1)");
  if (source != "auto" && source != "gaussian" && source != "exact")
    throw ConfigError("config: unknown source '" + source + "'");
  if (source == "exact" && model != "flat")
    throw ConfigError("config: the exact source exists only for the flat model");
  if (decay) {
    if (fine_n % decay_coarse_n != 0)
      throw ConfigError("config: decay_coarse_n does not nest in fine_n");
    if (decay_m_ref < 2) throw ConfigError("config: decay_m_ref too small");
  }
}

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  ExperimentConfig c;
  try {
    read_field(j, "model", c.model);
    read_field(j, "fine_n", c.fine_n);
    read_field(j, "coarse_n", c.coarse_n_list);
    read_field(j, "layers", c.m_list);
    read_field(j, "eigs", c.l_star);
    read_field(j, "sigma_plus", c.sigma_plus);
    read_field(j, "sigma_minus", c.sigma_minus);
    read_field(j, "gamma", c.gamma);
    read_field(j, "cells", c.n_cells);
    read_field(j, "seed", c.seed);
    read_field(j, "count", c.count);
    read_field(j, "side_lo", c.side_lo);
    read_field(j, "side_hi", c.side_hi);
    read_field(j, "source", c.source);
    read_field(j, "out", c.out_dir);
    read_field(j, "cache", c.use_cache);
    read_field(j, "threads", c.threads);
    read_field(j, "baseline", c.baseline);
    read_field(j, "spectra", c.spectra);
    read_field(j, "dump_fields", c.dump_fields);
    read_field(j, "decay", c.decay);
    read_field(j, "decay_coarse_n", c.decay_coarse_n);
    read_field(j, "decay_elem", c.decay_elem);
    read_field(j, "decay_m_ref", c.decay_m_ref);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: bad field type: ") + e.what());
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return from_json_text(text);
}

namespace {

CoefficientField make_field(const ExperimentConfig& c, const GridHierarchy& fine_only) {
  if (c.model == "flat")
    return flat_interface(fine_only, c.gamma, c.sigma_plus, c.sigma_minus).first;
  if (c.model == "square")
    return periodic_square(fine_only, c.n_cells, c.sigma_plus, c.sigma_minus);
  if (c.model == "cross")
    return periodic_cross(fine_only, c.n_cells, c.sigma_plus, c.sigma_minus);
  return random_inclusions(fine_only, c.seed, c.count, {c.side_lo, c.side_hi}, c.sigma_plus,
                           c.sigma_minus);
}

struct CsvRow {
  int coarse_n = 0;
  int m = 0;
  int l_star = 0;
  bool ok = false;
  ErrorReport report;
  std::string status = "ok";
  double offline_ms = 0.0;
  double online_ms = 0.0;
};

void write_error_csv(const std::string& path, const ExperimentConfig& c,
                     const std::vector<CsvRow>& rows) {
  std::ofstream os(path);
  if (!os) throw ConfigError("run: cannot open " + path);
  os << "model,fine_n,H,m,l_star,sigma_plus,sigma_minus,rel_energy,rel_l2,status,offline_ms,"
        "online_ms\n";
  for (const auto& r : rows) {
    os << c.model << "," << c.fine_n << "," << format_double(1.0 / r.coarse_n) << "," << r.m
       << "," << r.l_star << "," << format_double(c.sigma_plus) << ","
       << format_double(c.sigma_minus) << ",";
    if (r.ok)
      os << format_double(r.report.rel_energy) << "," << format_double(r.report.rel_l2);
    else
      os << ",";
    os << "," << csv_escape_status(r.status) << "," << format_double(r.offline_ms) << ","
       << format_double(r.online_ms) << "\n";
  }
}

}  // namespace

int run_experiment(const ExperimentConfig& config) {
  try {
    config.validate();
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  }

  namespace fs = std::filesystem;
  const fs::path out_dir(config.out_dir);
  fs::create_directories(out_dir);
  const fs::path cache_dir = out_dir / "cache";
  if (config.use_cache) fs::create_directories(cache_dir);
  const int threads = resolve_thread_count(config.threads);

  // The field generators only need the fine mesh; coarse_n enters later.
  const GridHierarchy fine_only = build_hierarchy(config.fine_n, 1);
  const CoefficientField field = make_field(config, fine_only);

  ExactSolution exact;
  bool has_exact = false;
  if (config.model == "flat") {
    exact = flat_interface(fine_only, config.gamma, config.sigma_plus, config.sigma_minus).second;
    has_exact = true;
  }

  SourceField source;
  if (config.source == "gaussian" || (config.source == "auto" && !has_exact)) {
    source = default_gaussian_source(fine_only);
  } else {
    source = nodal_source(fine_only, [&](double x, double y) { return exact.f(x, y); });
  }

  std::cerr << "[run] model=" << config.model << " fine_n=" << config.fine_n
            << " contrast=" << format_double(field.contrast()) << "\n";
  if (config.model == "flat") {
    std::cerr << "[run] flat interface well-posedness predicate: "
              << (flat_wellposed(config.gamma, config.sigma_plus, config.sigma_minus)
                      ? "well-posed"
                      : "critical band")
              << "\n";
  }

  // Reference solution: exact interpolant when available, else the fine solve.
  Eigen::VectorXd reference;
  bool reference_failed = false;
  std::string reference_error;
  if (has_exact) {
    reference = interpolate_exact(fine_only, exact);
  } else {
    try {
      const double t0 = now_ms();
      reference = solve_reference(fine_only, field, source).fine;
      std::cerr << "[run] fine reference solved in " << format_double(now_ms() - t0) << " ms\n";
    } catch (const std::exception& e) {
      reference_failed = true;
      reference_error = e.what();
      std::cerr << "[run] fine reference failed: " << e.what() << "\n";
    }
  }

  const Eigen::SparseMatrix<double> a_signed_full = global_signed_stiffness(fine_only, field);
  const Eigen::VectorXd load_full = global_load(fine_only, source);

  if (config.dump_fields) {
    write_vtk_cells((out_dir / "sigma.vtk").string(), fine_only, "sigma", field.values);
    write_field_csv((out_dir / "sigma.csv").string(), field);
    if (!reference_failed && reference.size() > 0) {
      write_vtk_nodal((out_dir / "reference.vtk").string(), fine_only, "u_ref", reference);
      write_nodal_csv((out_dir / "reference.csv").string(), fine_only, reference);
    }
  }

  std::vector<CsvRow> rows;
  std::ofstream spectra_csv;
  if (config.spectra) {
    spectra_csv.open((out_dir / "spectra.csv").string());
    spectra_csv << "model,fine_n,H,l_star,contrast,epsilon,l2_min,l2_max,l3_min,l3_max,l4_min,"
                   "l4_max\n";
  }

  int failures = 0, points = 0;
  for (int coarse_n : config.coarse_n_list) {
    const GridHierarchy g = build_hierarchy(config.fine_n, coarse_n);

    double t0 = now_ms();
    AuxSpace aux;
    bool aux_ok = true;
    std::string aux_error;
    const fs::path aux_path =
        cache_dir / ("aux_" + hex_hash(aux_provenance(g, field, config.l_star)) + ".bin");
    try {
      std::optional<AuxSpace> cached;
      if (config.use_cache) cached = load_aux_cache(aux_path.string(), g, field, config.l_star);
      if (cached) {
        aux = std::move(*cached);
      } else {
        aux = build_aux_space(g, field, config.l_star, threads);
        if (config.use_cache) save_aux_cache(aux_path.string(), aux);
      }
    } catch (const std::exception& e) {
      aux_ok = false;
      aux_error = e.what();
      std::cerr << "[run] aux space failed at coarse_n=" << coarse_n << ": " << e.what() << "\n";
    }
    const double aux_ms = now_ms() - t0;

    if (aux_ok && config.spectra) {
      const SpectralReport sr = spectral_statistics(aux, field);
      spectra_csv << config.model << "," << config.fine_n << "," << format_double(1.0 / coarse_n)
                  << "," << config.l_star << "," << format_double(sr.contrast) << ","
                  << format_double(sr.epsilon);
      for (int k = 0; k < 3; ++k) {
        if (k < sr.n_stats)
          spectra_csv << "," << format_double(sr.lambda_min[k]) << ","
                      << format_double(sr.lambda_max[k]);
        else
          spectra_csv << ",,";
      }
      spectra_csv << "\n";
    }

    for (int m : config.m_list) {
      CsvRow row;
      row.coarse_n = coarse_n;
      row.m = m;
      row.l_star = config.l_star;
      ++points;
      if (!aux_ok) {
        row.status = "error: " + aux_error;
        ++failures;
        rows.push_back(row);
        continue;
      }
      if (reference_failed) {
        row.status = "error: reference solve failed: " + reference_error;
        ++failures;
        rows.push_back(row);
        continue;
      }
      try {
        t0 = now_ms();
        MsBasisSet bases;
        const fs::path basis_path =
            cache_dir /
            ("bases_" + hex_hash(basis_provenance(g, field, config.l_star, m)) + ".bin");
        std::optional<MsBasisSet> cached;
        if (config.use_cache)
          cached = load_basis_cache(basis_path.string(),
                                    basis_provenance(g, field, config.l_star, m));
        if (cached) {
          bases = std::move(*cached);
        } else {
          bases = build_all(g, field, aux, m, threads);
          if (config.use_cache) save_basis_cache(basis_path.string(), bases);
        }
        row.offline_ms = aux_ms + (now_ms() - t0);

        t0 = now_ms();
        const CoarseSystem cs = assemble_online(g, field, bases, a_signed_full, load_full, threads);
        const Solution sol = solve_online(cs, g, bases);
        row.online_ms = now_ms() - t0;

        row.report = error_report(g, field, reference, sol.fine);
        row.ok = true;
        std::cerr << "[run] H=1/" << coarse_n << " m=" << m
                  << " rel_energy=" << format_double(row.report.rel_energy)
                  << " rel_l2=" << format_double(row.report.rel_l2) << "\n";
        if (config.dump_fields) {
          const std::string tag = "uH_c" + std::to_string(coarse_n) + "_m" + std::to_string(m);
          write_vtk_nodal((out_dir / (tag + ".vtk")).string(), fine_only, "u_H", sol.fine);
          write_nodal_csv((out_dir / (tag + ".csv")).string(), fine_only, sol.fine);
        }
      } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
        ++failures;
        std::cerr << "[run] sweep point H=1/" << coarse_n << " m=" << m << " failed: " << e.what()
                  << "\n";
      }
      rows.push_back(row);
    }
  }
  write_error_csv((out_dir / "errors.csv").string(), config, rows);

  if (config.baseline) {
    std::vector<CsvRow> baseline_rows;
    for (int coarse_n : config.coarse_n_list) {
      const GridHierarchy g = build_hierarchy(config.fine_n, coarse_n);
      CsvRow row;
      row.coarse_n = coarse_n;
      row.m = 0;
      row.l_star = 0;
      ++points;
      if (reference_failed) {
        row.status = "error: reference solve failed: " + reference_error;
        ++failures;
        baseline_rows.push_back(row);
        continue;
      }
      try {
        const double t0 = now_ms();
        const Solution sol = q1_coarse_solution(g, field, source);
        row.online_ms = now_ms() - t0;
        row.report = error_report(g, field, reference, sol.fine);
        row.ok = true;
        std::cerr << "[run] baseline H=1/" << coarse_n
                  << " rel_energy=" << format_double(row.report.rel_energy) << "\n";
      } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
        ++failures;
        std::cerr << "[run] baseline H=1/" << coarse_n << " failed: " << e.what() << "\n";
      }
      baseline_rows.push_back(row);
    }
    write_error_csv((out_dir / "baseline.csv").string(), config, baseline_rows);
  }

  if (config.decay) {
    const GridHierarchy g = build_hierarchy(config.fine_n, config.decay_coarse_n);
    const int elem = config.decay_elem >= 0 ? config.decay_elem : g.elem_id(1, 1);
    try {
      const AuxSpace aux = build_aux_space(g, field, config.l_star, threads);
      std::vector<int> m_list;
      for (int m = 1; m < config.decay_m_ref; ++m) m_list.push_back(m);
      std::ofstream os((out_dir / "decay.csv").string());
      os << "elem,j,m,m_ref,rel_energy_diff,rel_l2_diff\n";
      for (int j = 1; j <= config.l_star; ++j) {
        const auto points_j = decay_study(g, field, aux, elem, j, m_list, config.decay_m_ref);
        for (const auto& p : points_j)
          os << elem << "," << j << "," << p.m << "," << config.decay_m_ref << ","
             << format_double(p.rel_energy_diff) << "," << format_double(p.rel_l2_diff) << "\n";
      }
    } catch (const std::exception& e) {
      std::cerr << "[run] decay study failed: " << e.what() << "\n";
      ++failures;
      ++points;
    }
  }

  if (points > 0 && failures >= points) return 2;
  return 0;
}

}  // namespace cemsc
