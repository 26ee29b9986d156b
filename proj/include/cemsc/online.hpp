#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cemsc/cem.hpp"
#include "cemsc/coeff.hpp"
#include "cemsc/grid.hpp"

namespace cemsc {

/// Galerkin system in the multiscale space: G[p,q] = a(phi_p, phi_q) with the
/// signed form, r[p] = integral of f phi_p. Stored dense up to 5000 unknowns,
/// sparse above.
struct CoarseSystem {
  int n = 0;
  int coarse_n = 0;
  int l_star = 0;
  int m = 0;
  bool dense = false;
  Eigen::MatrixXd g_dense;
  Eigen::SparseMatrix<double> g_sparse;
  Eigen::VectorXd rhs;

  static constexpr int dense_limit = 5000;

  double coeff(int p, int q) const { return dense ? g_dense(p, q) : g_sparse.coeff(p, q); }
};

/// Signed global stiffness over all fine nodes (no Dirichlet restriction; the
/// basis functions vanish on the boundary anyway).
Eigen::SparseMatrix<double> global_signed_stiffness(const GridHierarchy& g,
                                                    const CoefficientField& field);

/// Global load vector over all fine nodes.
Eigen::VectorXd global_load(const GridHierarchy& g, const SourceField& f);

CoarseSystem assemble_online(const GridHierarchy& g, const CoefficientField& field,
                             const MsBasisSet& bases, const SourceField& f, int threads = 1);

/// Variant reusing precomputed fine-mesh operators across sweep points.
CoarseSystem assemble_online(const GridHierarchy& g, const CoefficientField& field,
                             const MsBasisSet& bases,
                             const Eigen::SparseMatrix<double>& a_signed_full,
                             const Eigen::VectorXd& load_full, int threads = 1);

struct Solution {
  Eigen::VectorXd coarse_coeffs;  // empty for the fine reference / baseline
  Eigen::VectorXd fine;           // values on every fine node, zero on the boundary
  int n_dofs = 0;                 // unknowns of the solve that produced it
};

/// Solves the coarse system and reconstructs the fine-node representation.
Solution solve_online(const CoarseSystem& cs, const GridHierarchy& g, const MsBasisSet& bases);

/// Fine-mesh Q1 reference solve of the full signed system.
Solution solve_reference(const GridHierarchy& g, const CoefficientField& field,
                         const SourceField& f);

/// Nodal interpolation of the flat-interface exact solution.
Eigen::VectorXd interpolate_exact(const GridHierarchy& g, const ExactSolution& e);

/// Direct Q1 solve on the coarse mesh with the exact piecewise-constant fine
/// coefficient integrated per coarse cell; result is prolongated to the fine
/// nodes (exact for bilinear functions of a nested mesh).
Solution q1_coarse_solution(const GridHierarchy& g, const CoefficientField& field,
                            const SourceField& f);

}  // namespace cemsc
