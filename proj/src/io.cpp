#include "cemsc/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "cemsc/assembly.hpp"

namespace cemsc {

namespace {

std::string full_precision(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T>
void put(std::ostream& os, const T& v) {
  static_assert(std::is_trivially_copyable_v<T>);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool get(std::istream& is, T& v) {
  static_assert(std::is_trivially_copyable_v<T>);
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return static_cast<bool>(is);
}

constexpr char kAuxMagic[8] = {'C', 'E', 'M', 'A', 'U', 'X', '1', '\0'};
constexpr char kBasMagic[8] = {'C', 'E', 'M', 'B', 'A', 'S', '1', '\0'};
constexpr std::uint32_t kCacheVersion = 1;

}  // namespace

void write_matrix_market(const std::string& path, const Eigen::SparseMatrix<double>& m) {
  std::ofstream os(path);
  if (!os) throw ConfigError("write_matrix_market: cannot open " + path);
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
      os << it.row() + 1 << " " << it.col() + 1 << " " << full_precision(it.value()) << "\n";
}

namespace {

void vtk_header(std::ostream& os, int dims, double spacing) {
  os << "# vtk DataFile Version 3.0\n";
  os << "cemsc field\n";
  os << "ASCII\n";
  os << "DATASET STRUCTURED_POINTS\n";
  os << "DIMENSIONS " << dims << " " << dims << " 1\n";
  os << "ORIGIN 0 0 0\n";
  os << "SPACING " << format_double(spacing) << " " << format_double(spacing) << " 1\n";
}

}  // namespace

void write_vtk_nodal(const std::string& path, const GridHierarchy& g, const std::string& name,
                     const Eigen::VectorXd& nodal) {
  if (nodal.size() != g.n_fine_nodes())
    throw DimensionError("write_vtk_nodal: vector does not match grid");
  std::ofstream os(path);
  if (!os) throw ConfigError("write_vtk_nodal: cannot open " + path);
  vtk_header(os, g.nodes_per_side(), g.h);
  os << "POINT_DATA " << g.n_fine_nodes() << "\n";
  os << "SCALARS " << name << " double 1\n";
  os << "LOOKUP_TABLE default\n";
  for (Eigen::Index i = 0; i < nodal.size(); ++i) os << format_double(nodal[i]) << "\n";
}

void write_vtk_cells(const std::string& path, const GridHierarchy& g, const std::string& name,
                     const std::vector<double>& cells) {
  if (static_cast<int>(cells.size()) != g.n_fine_cells())
    throw DimensionError("write_vtk_cells: vector does not match grid");
  std::ofstream os(path);
  if (!os) throw ConfigError("write_vtk_cells: cannot open " + path);
  vtk_header(os, g.nodes_per_side(), g.h);
  os << "CELL_DATA " << g.n_fine_cells() << "\n";
  os << "SCALARS " << name << " double 1\n";
  os << "LOOKUP_TABLE default\n";
  for (double v : cells) os << format_double(v) << "\n";
}

void write_nodal_csv(const std::string& path, const GridHierarchy& g,
                     const Eigen::VectorXd& nodal) {
  if (nodal.size() != g.n_fine_nodes())
    throw DimensionError("write_nodal_csv: vector does not match grid");
  std::ofstream os(path);
  if (!os) throw ConfigError("write_nodal_csv: cannot open " + path);
  for (int iy = 0; iy <= g.fine_n; ++iy) {
    for (int ix = 0; ix <= g.fine_n; ++ix) {
      if (ix) os << ",";
      os << full_precision(nodal[g.node_id(ix, iy)]);
    }
    os << "\n";
  }
}

void write_field_csv(const std::string& path, const CoefficientField& field) {
  std::ofstream os(path);
  if (!os) throw ConfigError("write_field_csv: cannot open " + path);
  for (int cy = 0; cy < field.fine_n; ++cy) {
    for (int cx = 0; cx < field.fine_n; ++cx) {
      if (cx) os << ",";
      os << full_precision(field.at(cx, cy));
    }
    os << "\n";
  }
}

CoefficientField read_field_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("read_field_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("read_field_csv: empty file " + path);
  const int n = static_cast<int>(rows.size());
  CoefficientField f;
  f.fine_n = n;
  f.values.resize(static_cast<std::size_t>(n) * n);
  for (int cy = 0; cy < n; ++cy) {
    if (static_cast<int>(rows[cy].size()) != n)
      throw ConfigError("read_field_csv: non-square field in " + path);
    for (int cx = 0; cx < n; ++cx) f.at(cx, cy) = rows[cy][cx];
  }
  f.finalize();
  return f;
}

void save_aux_cache(const std::string& path, const AuxSpace& aux) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("save_aux_cache: cannot open " + path);
  os.write(kAuxMagic, sizeof(kAuxMagic));
  put(os, kCacheVersion);
  put(os, aux.provenance);
  put(os, aux.fine_n);
  put(os, aux.coarse_n);
  put(os, aux.l_star);
  const int n_elem = static_cast<int>(aux.elements.size());
  put(os, n_elem);
  for (const auto& e : aux.elements) {
    os.write(reinterpret_cast<const char*>(e.eigenvalues.data()),
             static_cast<std::streamsize>(sizeof(double)) * e.eigenvalues.size());
    os.write(reinterpret_cast<const char*>(e.eigenvectors.data()),
             static_cast<std::streamsize>(sizeof(double)) * e.eigenvectors.size());
  }
}

std::optional<AuxSpace> load_aux_cache(const std::string& path, const GridHierarchy& g,
                                       const CoefficientField& field, int l_star) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  char magic[8];
  is.read(magic, sizeof(magic));
  std::uint32_t version = 0;
  std::uint64_t provenance = 0;
  int fine_n = 0, coarse_n = 0, stored_l = 0, n_elem = 0;
  if (!is || std::memcmp(magic, kAuxMagic, sizeof(magic)) != 0) return std::nullopt;
  if (!get(is, version) || version != kCacheVersion) return std::nullopt;
  if (!get(is, provenance) || provenance != aux_provenance(g, field, l_star)) return std::nullopt;
  if (!get(is, fine_n) || !get(is, coarse_n) || !get(is, stored_l) || !get(is, n_elem))
    return std::nullopt;
  if (fine_n != g.fine_n || coarse_n != g.coarse_n || stored_l != l_star ||
      n_elem != g.n_elem())
    return std::nullopt;

  AuxSpace aux;
  aux.fine_n = fine_n;
  aux.coarse_n = coarse_n;
  aux.l_star = l_star;
  aux.provenance = provenance;
  aux.elements.resize(n_elem);
  const int n_k = (g.sub_n + 1) * (g.sub_n + 1);
  for (int i = 0; i < n_elem; ++i) {
    ElementAux& e = aux.elements[i];
    e.eigenvalues.resize(l_star + 1);
    e.eigenvectors.resize(n_k, l_star);
    is.read(reinterpret_cast<char*>(e.eigenvalues.data()),
            static_cast<std::streamsize>(sizeof(double)) * e.eigenvalues.size());
    is.read(reinterpret_cast<char*>(e.eigenvectors.data()),
            static_cast<std::streamsize>(sizeof(double)) * e.eigenvectors.size());
    if (!is) return std::nullopt;
    // The mass couplings are cheap and deterministic; rebuild instead of storing.
    const LocalDofMap dofs = element_dof_map(g, i);
    const auto b_abs =
        assemble(g, field, WeightSpec::abs_mu(g), dofs, OperatorKind::Mass, Restriction::None);
    const auto b_signed =
        assemble(g, field, WeightSpec::signed_mu(g), dofs, OperatorKind::Mass, Restriction::None);
    e.weighted_mass = b_abs.mat * e.eigenvectors;
    e.signed_gram = e.eigenvectors.transpose() * (b_signed.mat * e.eigenvectors).eval();
    e.lambda_star = e.eigenvalues[l_star];
  }
  aux.epsilon = 1.0 / aux.max_lambda_star();
  return aux;
}

void save_basis_cache(const std::string& path, const MsBasisSet& set) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("save_basis_cache: cannot open " + path);
  os.write(kBasMagic, sizeof(kBasMagic));
  put(os, kCacheVersion);
  put(os, set.provenance);
  put(os, set.fine_n);
  put(os, set.coarse_n);
  put(os, set.l_star);
  put(os, set.m);
  put(os, set.count());
  for (const auto& b : set.bases) {
    put(os, b.elem);
    put(os, b.j);
    put(os, static_cast<std::uint64_t>(b.support.size()));
    os.write(reinterpret_cast<const char*>(b.support.data()),
             static_cast<std::streamsize>(sizeof(int)) * b.support.size());
    os.write(reinterpret_cast<const char*>(b.values.data()),
             static_cast<std::streamsize>(sizeof(double)) * b.values.size());
  }
}

std::optional<MsBasisSet> load_basis_cache(const std::string& path, std::uint64_t provenance) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  char magic[8];
  is.read(magic, sizeof(magic));
  std::uint32_t version = 0;
  std::uint64_t stored = 0;
  if (!is || std::memcmp(magic, kBasMagic, sizeof(magic)) != 0) return std::nullopt;
  if (!get(is, version) || version != kCacheVersion) return std::nullopt;
  if (!get(is, stored) || stored != provenance) return std::nullopt;
  MsBasisSet set;
  set.provenance = stored;
  int n_bases = 0;
  if (!get(is, set.fine_n) || !get(is, set.coarse_n) || !get(is, set.l_star) || !get(is, set.m) ||
      !get(is, n_bases))
    return std::nullopt;
  set.bases.resize(n_bases);
  for (auto& b : set.bases) {
    std::uint64_t count = 0;
    if (!get(is, b.elem) || !get(is, b.j) || !get(is, count)) return std::nullopt;
    b.support.resize(count);
    b.values.resize(count);
    is.read(reinterpret_cast<char*>(b.support.data()),
            static_cast<std::streamsize>(sizeof(int)) * count);
    is.read(reinterpret_cast<char*>(b.values.data()),
            static_cast<std::streamsize>(sizeof(double)) * count);
    if (!is) return std::nullopt;
  }
  return set;
}

}  // namespace cemsc
