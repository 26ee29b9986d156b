#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cemsc/assembly.hpp"
#include "cemsc/coeff.hpp"
#include "cemsc/grid.hpp"

namespace cemsc {

/// Eigenpairs of the per-element generalized problem
///   |sigma|-stiffness v = lambda * (24 H^-2 |sigma|)-mass v
/// on all element nodes (Neumann). Eigenvectors are orthonormal in the
/// weighted-mass inner product and carry a deterministic sign (first
/// above-noise component positive).
struct ElementAux {
  Eigen::VectorXd eigenvalues;   // l*+1 values, ascending, clamped at zero
  Eigen::MatrixXd eigenvectors;  // n_K x l*, B-orthonormal
  Eigen::MatrixXd weighted_mass; // Y = B_abs * eigenvectors, n_K x l*
  Eigen::MatrixXd signed_gram;   // S = psi^T B_signed psi, l* x l*
  double lambda_star = 0.0;      // eigenvalues[l*], the spectral gap value
};

struct AuxSpace {
  int fine_n = 0;
  int coarse_n = 0;
  int l_star = 0;
  std::uint64_t provenance = 0;  // hash of (grid, field, l*)
  std::vector<ElementAux> elements;
  double epsilon = 0.0;  // 1 / max_i lambda_i*

  double max_lambda_star() const;
};

std::uint64_t aux_provenance(const GridHierarchy& g, const CoefficientField& field, int l_star);

ElementAux solve_local_eigen(const GridHierarchy& g, const CoefficientField& field, int elem,
                             int l_star);

/// Solves every element problem. Identical local coefficient patterns share
/// one eigensolve; the copied results are bitwise what a fresh solve returns.
AuxSpace build_aux_space(const GridHierarchy& g, const CoefficientField& field, int l_star,
                         int threads = 1);

/// Auxiliary-space functions are per-element objects (zero-extended in L^2,
/// discontinuous across element edges), so the projection is stored as one
/// coefficient row per coarse element.
struct Projection {
  int l_star = 0;
  Eigen::MatrixXd coeffs;  // n_elem x l*, zero outside the projected region

  Eigen::Index n_elem() const { return coeffs.rows(); }
};

/// Weighted-L2-orthogonal projection onto the auxiliary space: per element,
/// c = Y_i^T v|_{K_i}. Elements outside `region` (when given) contribute zero.
Projection project(const AuxSpace& aux, const GridHierarchy& g, const Eigen::VectorXd& fine_nodal,
                   const Region* region = nullptr);

/// Projection restricted to the auxiliary space itself; exactly idempotent.
Projection project(const AuxSpace& aux, const Projection& p);

/// Nodal values of the projected function on one element's nodes.
Eigen::VectorXd element_values(const AuxSpace& aux, const GridHierarchy& g, const Projection& p,
                               int elem);

/// Scatters a projection to a global nodal vector, averaging the (generally
/// discontinuous) values at shared element-edge nodes. Visualization only.
Eigen::VectorXd projection_to_nodal(const AuxSpace& aux, const GridHierarchy& g,
                                    const Projection& p);

/// Min/max of lambda_2..lambda_4 over elements (truncated when l*+1 < 4).
struct SpectralReport {
  int coarse_n = 0;
  int n_stats = 0;  // how many of lambda_2..lambda_4 are available
  std::array<double, 3> lambda_min{};
  std::array<double, 3> lambda_max{};
  double epsilon = 0.0;
  double contrast = 0.0;  // Upsilon of the field
};

SpectralReport spectral_statistics(const AuxSpace& aux, const CoefficientField& field);

/// Eigenvalues of the signed-coefficient formulation on one element. The
/// signed pencil is not definite, so this exists only to demonstrate the
/// negative eigenvalues that rule it out; the pipeline never uses it.
std::vector<double> signed_eigenvalues_diagnostic(const GridHierarchy& g,
                                                  const CoefficientField& field, int elem,
                                                  int count);

/// Local problem size at or below which the dense eigensolver is used.
inline constexpr int kDenseEigenMaxDim = 2500;

}  // namespace cemsc
