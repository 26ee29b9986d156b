#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "cemsc/grid.hpp"

namespace cemsc {

/// Piecewise-constant diffusion coefficient, one value per fine cell, positive
/// on the matrix subdomain and negative on the inclusions. Summary scalars are
/// taken over the respective subdomains (minus-side values as magnitudes).
struct CoefficientField {
  int fine_n = 0;
  std::vector<double> values;  // cell id = cy * fine_n + cx

  bool has_positive = false;
  bool has_negative = false;
  double sigma_plus_max = 0.0, sigma_plus_min = 0.0;
  double sigma_minus_max = 0.0, sigma_minus_min = 0.0;

  double at(int cx, int cy) const { return values[static_cast<std::size_t>(cy) * fine_n + cx]; }
  double& at(int cx, int cy) { return values[static_cast<std::size_t>(cy) * fine_n + cx]; }

  /// Upsilon = sigma^+_min / sigma^-_max; +inf when the negative part is empty.
  double contrast() const;
  double negative_area_fraction() const;
  std::uint64_t content_hash() const;

  /// Recomputes the summary scalars; throws if any cell value is zero.
  void finalize();
};

CoefficientField constant_field(int fine_n, double sigma);
CoefficientField scaled(const CoefficientField& f, double c);

/// Closed-form solution of the flat-interface model: sigma = +sigma_plus above
/// the line x2 = gamma and -sigma_minus below, homogeneous Dirichlet data.
struct ExactSolution {
  double gamma = 0.5;
  double sigma_plus = 1.0;
  double sigma_minus = 1.0;

  double u(double x1, double x2) const;
  double f(double x1, double x2) const;
  double du_dx1(double x1, double x2) const;
  double du_dx2(double x1, double x2) const;
};

std::pair<CoefficientField, ExactSolution> flat_interface(const GridHierarchy& g, double gamma,
                                                          double sigma_plus, double sigma_minus);

/// T-coercivity contrast check for the flat interface: for gamma <= 1/2 the
/// problem is well posed iff sigma_minus/sigma_plus lies outside
/// [gamma/(1-gamma), 1]; for gamma > 1/2 the band is [1, gamma/(1-gamma)] by
/// swapping the subdomains.
bool flat_wellposed(double gamma, double sigma_plus, double sigma_minus);

/// n_cells x n_cells periodic tiling; each cell carries a centered square
/// inclusion of half the cell side with the negative coefficient.
CoefficientField periodic_square(const GridHierarchy& g, int n_cells, double sigma_plus,
                                 double sigma_minus);

/// Periodic plus-shaped inclusions with arm width cell/5; arms span the full
/// cell so neighboring crosses connect into channels crossing the domain.
CoefficientField periodic_cross(const GridHierarchy& g, int n_cells, double sigma_plus,
                                double sigma_minus);

struct SideRange {
  int lo = 0;
  int hi = 0;
};

/// Seeded axis-aligned square inclusions with side lengths (in fine cells)
/// uniform in side_range and uniform positions; overlaps allowed, the union
/// forms the negative subdomain. Pure function of the seed.
CoefficientField random_inclusions(const GridHierarchy& g, std::uint64_t seed, int count,
                                   SideRange side_range, double sigma_plus, double sigma_minus);

/// Right-hand side sampled at fine nodes.
struct SourceField {
  int fine_n = 0;
  std::vector<double> values;  // per fine node
};

SourceField gaussian_source(const GridHierarchy& g, const std::vector<std::array<double, 2>>& centers,
                            double variance, double amplitude);

/// The four-bump source used by the inclusion experiments.
SourceField default_gaussian_source(const GridHierarchy& g);

SourceField nodal_source(const GridHierarchy& g, const std::function<double(double, double)>& f);

}  // namespace cemsc
