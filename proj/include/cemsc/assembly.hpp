#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cemsc/coeff.hpp"
#include "cemsc/grid.hpp"

namespace cemsc {

/// Cell weight entering the bilinear forms: the signed coefficient sigma, its
/// absolute value, the weighted-mass coefficient mu = 24 H^-2 sigma (signed or
/// absolute), or the unit weight.
enum class WeightMode { SignedSigma, AbsSigma, SignedMu, AbsMu, Unit };

enum class OperatorKind { Stiffness, Mass };

enum class Restriction { InteriorOnly, None };

enum class Definiteness { Indefinite, PositiveSemidefinite, PositiveDefinite };

struct WeightSpec {
  WeightMode mode = WeightMode::Unit;
  double mu_scale = 0.0;  // 24 H^-2, required by the mu modes

  static WeightSpec signed_sigma() { return {WeightMode::SignedSigma, 0.0}; }
  static WeightSpec abs_sigma() { return {WeightMode::AbsSigma, 0.0}; }
  static WeightSpec unit() { return {WeightMode::Unit, 0.0}; }
  static WeightSpec signed_mu(const GridHierarchy& g) {
    return {WeightMode::SignedMu, 24.0 * g.coarse_n * g.coarse_n};
  }
  static WeightSpec abs_mu(const GridHierarchy& g) {
    return {WeightMode::AbsMu, 24.0 * g.coarse_n * g.coarse_n};
  }
};

struct SparseSymMatrix {
  Eigen::SparseMatrix<double> mat;  // CSC with sorted inner indices, full storage
  Definiteness definiteness = Definiteness::Indefinite;

  Eigen::Index rows() const { return mat.rows(); }
};

/// Exact Q1 element stiffness on an h x h square, corner order
/// (0,0),(h,0),(h,h),(0,h); independent of h in 2D.
Eigen::Matrix4d local_q1_stiffness(double h);

/// Exact Q1 element mass, (h^2/36) [[4,2,1,2],[2,4,2,1],[1,2,4,2],[2,1,2,4]].
Eigen::Matrix4d local_q1_mass(double h);

/// Assembles the weighted stiffness or mass form over the cells of the dof
/// map's box. With Restriction::InteriorOnly rows/columns are limited to the
/// interior (discrete H^1_0) nodes; None keeps every node (Neumann-style).
SparseSymMatrix assemble(const GridHierarchy& g, const CoefficientField& field,
                         const WeightSpec& w, const LocalDofMap& dofs, OperatorKind op,
                         Restriction restriction);

/// Load vector with consistent-mass quadrature, b = M_unit * f_nodes.
Eigen::VectorXd assemble_load(const GridHierarchy& g, const SourceField& f,
                              const LocalDofMap& dofs, Restriction restriction);

}  // namespace cemsc
