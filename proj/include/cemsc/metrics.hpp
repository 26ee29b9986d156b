#pragma once

#include <Eigen/Dense>
#include <string>

#include "cemsc/coeff.hpp"
#include "cemsc/grid.hpp"

namespace cemsc {

/// Weighted energy seminorm (integral of |sigma| |grad v|^2)^(1/2) over the
/// region (or the whole domain). No Dirichlet restriction is applied.
double energy_norm(const GridHierarchy& g, const CoefficientField& field,
                   const Eigen::VectorXd& v);
double energy_norm(const GridHierarchy& g, const CoefficientField& field,
                   const Eigen::VectorXd& v, const Region& r);

/// Plain L2 norm with consistent (not lumped) mass.
double l2_norm(const GridHierarchy& g, const Eigen::VectorXd& v);

/// Weighted L2 norm with weight |mu| = 24 H^-2 |sigma| over a region.
double s_norm(const GridHierarchy& g, const CoefficientField& field, const Eigen::VectorXd& v,
              const Region& r);

/// Cross term v^T A_abs w of the energy inner product over the whole domain.
double energy_inner(const GridHierarchy& g, const CoefficientField& field,
                    const Eigen::VectorXd& v, const Eigen::VectorXd& w);

struct ErrorReport {
  double rel_energy = 0.0;
  double rel_l2 = 0.0;
  double ref_energy = 0.0;
  double ref_l2 = 0.0;
  double err_energy = 0.0;
  double err_l2 = 0.0;

  // configuration echo
  std::string model;
  int fine_n = 0;
  int coarse_n = 0;
  int m = 0;
  int l_star = 0;
  double sigma_plus = 0.0;
  double sigma_minus = 0.0;
};

/// Relative energy and L2 error of u_num against u_ref; throws when a
/// reference norm vanishes or a ratio is not finite.
ErrorReport error_report(const GridHierarchy& g, const CoefficientField& field,
                         const Eigen::VectorXd& u_ref, const Eigen::VectorXd& u_num);

}  // namespace cemsc
