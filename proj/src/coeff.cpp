#include "cemsc/coeff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace cemsc {

void CoefficientField::finalize() {
  has_positive = has_negative = false;
  sigma_plus_max = sigma_minus_max = 0.0;
  sigma_plus_min = sigma_minus_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (v == 0.0) throw ConfigError("CoefficientField: zero value in cell " + std::to_string(i));
    if (v > 0.0) {
      has_positive = true;
      sigma_plus_max = std::max(sigma_plus_max, v);
      sigma_plus_min = std::min(sigma_plus_min, v);
    } else {
      has_negative = true;
      sigma_minus_max = std::max(sigma_minus_max, -v);
      sigma_minus_min = std::min(sigma_minus_min, -v);
    }
  }
  if (!has_positive) sigma_plus_min = 0.0;
  if (!has_negative) sigma_minus_min = 0.0;
}

double CoefficientField::contrast() const {
  if (!has_negative) return std::numeric_limits<double>::infinity();
  return sigma_plus_min / sigma_minus_max;
}

double CoefficientField::negative_area_fraction() const {
  std::size_t neg = 0;
  for (double v : values)
    if (v < 0.0) ++neg;
  return static_cast<double>(neg) / static_cast<double>(values.size());
}

std::uint64_t CoefficientField::content_hash() const {
  HashStream h;
  h.add(fine_n);
  h.add_vector(values);
  return h.digest();
}

CoefficientField constant_field(int fine_n, double sigma) {
  CoefficientField f;
  f.fine_n = fine_n;
  f.values.assign(static_cast<std::size_t>(fine_n) * fine_n, sigma);
  f.finalize();
  return f;
}

CoefficientField scaled(const CoefficientField& f, double c) {
  CoefficientField out = f;
  for (double& v : out.values) v *= c;
  out.finalize();
  return out;
}

namespace {

double bubble(double x1, double x2, double gamma) {
  return x1 * (x1 - 1.0) * x2 * (x2 - 1.0) * (x2 - gamma);
}

double bubble_dx2(double x1, double x2, double gamma) {
  // d/dx2 of x2 (x2-1)(x2-gamma) = 3 x2^2 - 2(1+gamma) x2 + gamma
  return x1 * (x1 - 1.0) * (3.0 * x2 * x2 - 2.0 * (1.0 + gamma) * x2 + gamma);
}

}  // namespace

double ExactSolution::u(double x1, double x2) const {
  const double b = bubble(x1, x2, gamma);
  return x2 > gamma ? -sigma_minus * b : sigma_plus * b;
}

double ExactSolution::f(double x1, double x2) const {
  return sigma_minus * sigma_plus *
         (2.0 * x2 * (x2 - 1.0) * (x2 - gamma) +
          x1 * (x1 - 1.0) * (6.0 * x2 - 2.0 * (gamma + 1.0)));
}

double ExactSolution::du_dx1(double x1, double x2) const {
  const double b = (2.0 * x1 - 1.0) * x2 * (x2 - 1.0) * (x2 - gamma);
  return x2 > gamma ? -sigma_minus * b : sigma_plus * b;
}

double ExactSolution::du_dx2(double x1, double x2) const {
  const double b = bubble_dx2(x1, x2, gamma);
  return x2 > gamma ? -sigma_minus * b : sigma_plus * b;
}

std::pair<CoefficientField, ExactSolution> flat_interface(const GridHierarchy& g, double gamma,
                                                          double sigma_plus, double sigma_minus) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw ConfigError("flat_interface: gamma must lie in (0,1)");
  if (!(sigma_plus > 0.0 && sigma_minus > 0.0))
    throw ConfigError("flat_interface: sigma magnitudes must be positive");
  CoefficientField f;
  f.fine_n = g.fine_n;
  f.values.resize(static_cast<std::size_t>(g.fine_n) * g.fine_n);
  for (int cy = 0; cy < g.fine_n; ++cy) {
    const double center_x2 = (cy + 0.5) * g.h;
    const double v = center_x2 > gamma ? sigma_plus : -sigma_minus;
    for (int cx = 0; cx < g.fine_n; ++cx) f.at(cx, cy) = v;
  }
  f.finalize();
  ExactSolution e;
  e.gamma = gamma;
  e.sigma_plus = sigma_plus;
  e.sigma_minus = sigma_minus;
  return {std::move(f), e};
}

bool flat_wellposed(double gamma, double sigma_plus, double sigma_minus) {
  const double ratio = sigma_minus / sigma_plus;
  if (gamma <= 0.5) {
    const double lo = gamma / (1.0 - gamma);
    return ratio < lo || ratio > 1.0;
  }
  const double hi = gamma / (1.0 - gamma);
  return ratio < 1.0 || ratio > hi;
}

CoefficientField periodic_square(const GridHierarchy& g, int n_cells, double sigma_plus,
                                 double sigma_minus) {
  if (n_cells < 1 || g.fine_n % (2 * n_cells) != 0)
    throw ConfigError("periodic_square: fine_n must be divisible by 2*n_cells");
  const int period = g.fine_n / n_cells;
  const int side = period / 2;
  const int lo = (period - side) / 2;
  CoefficientField f;
  f.fine_n = g.fine_n;
  f.values.resize(static_cast<std::size_t>(g.fine_n) * g.fine_n);
  for (int cy = 0; cy < g.fine_n; ++cy) {
    const int py = cy % period;
    for (int cx = 0; cx < g.fine_n; ++cx) {
      const int px = cx % period;
      const bool inside = px >= lo && px < lo + side && py >= lo && py < lo + side;
      f.at(cx, cy) = inside ? -sigma_minus : sigma_plus;
    }
  }
  f.finalize();
  return f;
}

CoefficientField periodic_cross(const GridHierarchy& g, int n_cells, double sigma_plus,
                                double sigma_minus) {
  if (n_cells < 1 || g.fine_n % (5 * n_cells) != 0)
    throw ConfigError("periodic_cross: fine_n must be divisible by 5*n_cells");
  const int period = g.fine_n / n_cells;
  const int arm = period / 5;
  const int lo = (period - arm) / 2;
  CoefficientField f;
  f.fine_n = g.fine_n;
  f.values.resize(static_cast<std::size_t>(g.fine_n) * g.fine_n);
  for (int cy = 0; cy < g.fine_n; ++cy) {
    const int py = cy % period;
    const bool in_row = py >= lo && py < lo + arm;
    for (int cx = 0; cx < g.fine_n; ++cx) {
      const int px = cx % period;
      const bool in_col = px >= lo && px < lo + arm;
      f.at(cx, cy) = (in_row || in_col) ? -sigma_minus : sigma_plus;
    }
  }
  f.finalize();
  return f;
}

CoefficientField random_inclusions(const GridHierarchy& g, std::uint64_t seed, int count,
                                   SideRange side_range, double sigma_plus, double sigma_minus) {
  if (count < 0) throw ConfigError("random_inclusions: negative count");
  if (count > 0 && (side_range.lo < 1 || side_range.hi < side_range.lo ||
                    side_range.hi > g.fine_n))
    throw ConfigError("random_inclusions: invalid side range");
  CoefficientField f = constant_field(g.fine_n, sigma_plus);
  // Hand-rolled bounded draws: uniform_int_distribution is implementation
  // defined, and the layout must be a pure function of the seed.
  std::mt19937_64 rng(seed);
  auto draw = [&rng](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  for (int k = 0; k < count; ++k) {
    const int side = draw(side_range.lo, side_range.hi);
    const int x0 = draw(0, g.fine_n - side);
    const int y0 = draw(0, g.fine_n - side);
    for (int cy = y0; cy < y0 + side; ++cy)
      for (int cx = x0; cx < x0 + side; ++cx) f.at(cx, cy) = -sigma_minus;
  }
  f.finalize();
  return f;
}

SourceField gaussian_source(const GridHierarchy& g, const std::vector<std::array<double, 2>>& centers,
                            double variance, double amplitude) {
  if (!(variance > 0.0)) throw ConfigError("gaussian_source: variance must be positive");
  SourceField s;
  s.fine_n = g.fine_n;
  s.values.resize(static_cast<std::size_t>(g.n_fine_nodes()));
  for (int iy = 0; iy <= g.fine_n; ++iy) {
    const double y = g.node_y(iy);
    for (int ix = 0; ix <= g.fine_n; ++ix) {
      const double x = g.node_x(ix);
      double v = 0.0;
      for (const auto& c : centers) {
        const double dx = x - c[0];
        const double dy = y - c[1];
        v += std::exp(-(dx * dx + dy * dy) / (2.0 * variance));
      }
      s.values[g.node_id(ix, iy)] = amplitude * v;
    }
  }
  return s;
}

SourceField default_gaussian_source(const GridHierarchy& g) {
  return gaussian_source(
      g, {{0.25, 0.25}, {0.75, 0.25}, {0.25, 0.75}, {0.75, 0.75}}, 0.01, 1.0);
}

SourceField nodal_source(const GridHierarchy& g, const std::function<double(double, double)>& f) {
  SourceField s;
  s.fine_n = g.fine_n;
  s.values.resize(static_cast<std::size_t>(g.n_fine_nodes()));
  for (int iy = 0; iy <= g.fine_n; ++iy)
    for (int ix = 0; ix <= g.fine_n; ++ix)
      s.values[g.node_id(ix, iy)] = f(g.node_x(ix), g.node_y(iy));
  return s;
}

}  // namespace cemsc
