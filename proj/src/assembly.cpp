#include "cemsc/assembly.hpp"

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace cemsc {

Eigen::Matrix4d local_q1_stiffness(double h) {
  if (!(h > 0.0)) throw ConfigError("local_q1_stiffness: h must be positive");
  Eigen::Matrix4d k;
  const double d = 2.0 / 3.0, e = -1.0 / 6.0, o = -1.0 / 3.0;
  k << d, e, o, e,
       e, d, e, o,
       o, e, d, e,
       e, o, e, d;
  return k;
}

Eigen::Matrix4d local_q1_mass(double h) {
  if (!(h > 0.0)) throw ConfigError("local_q1_mass: h must be positive");
  Eigen::Matrix4d m;
  m << 4, 2, 1, 2,
       2, 4, 2, 1,
       1, 2, 4, 2,
       2, 1, 2, 4;
  return (h * h / 36.0) * m;
}

namespace {

double cell_weight(const WeightSpec& w, double sigma) {
  switch (w.mode) {
    case WeightMode::SignedSigma: return sigma;
    case WeightMode::AbsSigma: return std::abs(sigma);
    case WeightMode::SignedMu: return w.mu_scale * sigma;
    case WeightMode::AbsMu: return w.mu_scale * std::abs(sigma);
    case WeightMode::Unit: return 1.0;
  }
  return 0.0;
}

bool weight_is_signed(WeightMode m) {
  return m == WeightMode::SignedSigma || m == WeightMode::SignedMu;
}

Definiteness classify(OperatorKind op, const WeightSpec& w, const CoefficientField& field,
                      Restriction restriction) {
  if (weight_is_signed(w.mode) && field.has_negative) return Definiteness::Indefinite;
  if (op == OperatorKind::Mass) return Definiteness::PositiveDefinite;
  return restriction == Restriction::InteriorOnly ? Definiteness::PositiveDefinite
                                                  : Definiteness::PositiveSemidefinite;
}

void check_mu_mode(const WeightSpec& w) {
  if ((w.mode == WeightMode::SignedMu || w.mode == WeightMode::AbsMu) && !(w.mu_scale > 0.0))
    throw ConfigError("WeightSpec: mu modes require the 24 H^-2 scale from a grid");
}

}  // namespace

SparseSymMatrix assemble(const GridHierarchy& g, const CoefficientField& field,
                         const WeightSpec& w, const LocalDofMap& dofs, OperatorKind op,
                         Restriction restriction) {
  if (field.fine_n != g.fine_n)
    throw DimensionError("assemble: field resolution " + std::to_string(field.fine_n) +
                         " does not match grid fine_n " + std::to_string(g.fine_n));
  check_mu_mode(w);

  const Eigen::Matrix4d base =
      op == OperatorKind::Stiffness ? local_q1_stiffness(g.h) : local_q1_mass(g.h);
  const bool interior_only = restriction == Restriction::InteriorOnly;
  const int n = interior_only ? dofs.n_interior() : dofs.n_local();

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(dofs.width() - 1) * (dofs.height() - 1) * 16);
  for (int cy = dofs.ny0; cy < dofs.ny1; ++cy) {
    for (int cx = dofs.nx0; cx < dofs.nx1; ++cx) {
      const double weight = cell_weight(w, field.at(cx, cy));
      const std::array<int, 4> corners = {
          dofs.local_of(cx, cy), dofs.local_of(cx + 1, cy),
          dofs.local_of(cx + 1, cy + 1), dofs.local_of(cx, cy + 1)};
      for (int a = 0; a < 4; ++a) {
        const int ra = interior_only ? dofs.interior_index[corners[a]] : corners[a];
        if (ra < 0) continue;
        for (int b = 0; b < 4; ++b) {
          const int rb = interior_only ? dofs.interior_index[corners[b]] : corners[b];
          if (rb < 0) continue;
          triplets.emplace_back(ra, rb, weight * base(a, b));
        }
      }
    }
  }
  SparseSymMatrix out;
  out.mat.resize(n, n);
  out.mat.setFromTriplets(triplets.begin(), triplets.end());
  out.mat.makeCompressed();
  out.definiteness = classify(op, w, field, restriction);
  return out;
}

Eigen::VectorXd assemble_load(const GridHierarchy& g, const SourceField& f,
                              const LocalDofMap& dofs, Restriction restriction) {
  if (f.fine_n != g.fine_n)
    throw DimensionError("assemble_load: source resolution does not match grid");
  const Eigen::Matrix4d mass = local_q1_mass(g.h);
  Eigen::VectorXd full = Eigen::VectorXd::Zero(dofs.n_local());
  for (int cy = dofs.ny0; cy < dofs.ny1; ++cy) {
    for (int cx = dofs.nx0; cx < dofs.nx1; ++cx) {
      const std::array<int, 4> locals = {
          dofs.local_of(cx, cy), dofs.local_of(cx + 1, cy),
          dofs.local_of(cx + 1, cy + 1), dofs.local_of(cx, cy + 1)};
      const std::array<int, 4> globals = {
          g.node_id(cx, cy), g.node_id(cx + 1, cy),
          g.node_id(cx + 1, cy + 1), g.node_id(cx, cy + 1)};
      for (int a = 0; a < 4; ++a) {
        double v = 0.0;
        for (int b = 0; b < 4; ++b) v += mass(a, b) * f.values[globals[b]];
        full[locals[a]] += v;
      }
    }
  }
  if (restriction == Restriction::None) return full;
  Eigen::VectorXd out(dofs.n_interior());
  for (int s = 0; s < dofs.n_interior(); ++s) out[s] = full[dofs.interior_locals[s]];
  return out;
}

}  // namespace cemsc
