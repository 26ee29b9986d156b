#pragma once

#include <Eigen/Sparse>
#include <optional>
#include <string>

#include "cemsc/auxspace.hpp"
#include "cemsc/cem.hpp"
#include "cemsc/coeff.hpp"
#include "cemsc/grid.hpp"

namespace cemsc {

/// MatrixMarket coordinate export (debugging aid).
void write_matrix_market(const std::string& path, const Eigen::SparseMatrix<double>& m);

/// Legacy-VTK structured points with one scalar field on the fine nodes.
void write_vtk_nodal(const std::string& path, const GridHierarchy& g, const std::string& name,
                     const Eigen::VectorXd& nodal);

/// Legacy-VTK structured points with one scalar per fine cell.
void write_vtk_cells(const std::string& path, const GridHierarchy& g, const std::string& name,
                     const std::vector<double>& cells);

/// Nodal values as CSV, one row per node line (row 0 = bottom).
void write_nodal_csv(const std::string& path, const GridHierarchy& g,
                     const Eigen::VectorXd& nodal);

/// Coefficient exchange format: fine_n rows x fine_n columns, row 0 = bottom.
void write_field_csv(const std::string& path, const CoefficientField& field);
CoefficientField read_field_csv(const std::string& path);

/// Binary caches keyed by provenance hashes; loaders return nothing on any
/// mismatch (wrong magic, version, or hash) so callers recompute.
void save_aux_cache(const std::string& path, const AuxSpace& aux);
std::optional<AuxSpace> load_aux_cache(const std::string& path, const GridHierarchy& g,
                                       const CoefficientField& field, int l_star);

void save_basis_cache(const std::string& path, const MsBasisSet& set);
std::optional<MsBasisSet> load_basis_cache(const std::string& path, std::uint64_t provenance);

}  // namespace cemsc
