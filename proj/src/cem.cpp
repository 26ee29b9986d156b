#include "cemsc/cem.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "cemsc/assembly.hpp"
#include "cemsc/linsolve.hpp"
#include "cemsc/metrics.hpp"

namespace cemsc {

namespace {

/// Y_K restricted to the region's interior slots: rows are interior dof slots,
/// nonzero only on the element's nodes.
struct RestrictedCoupling {
  std::vector<int> slots;   // interior slot per kept element node
  Eigen::MatrixXd y;        // kept rows of Y_K
  Eigen::MatrixXd ys;       // y * S_K
};

RestrictedCoupling restrict_coupling(const GridHierarchy& g, const AuxSpace& aux,
                                     const LocalDofMap& dofs, int elem) {
  const ElementAux& e = aux.elements[elem];
  auto [ex, ey] = g.elem_coords(elem);
  const int nx0 = ex * g.sub_n, ny0 = ey * g.sub_n;
  const int side = g.sub_n + 1;
  RestrictedCoupling rc;
  std::vector<int> kept_rows;
  for (int ly = 0; ly < side; ++ly) {
    for (int lx = 0; lx < side; ++lx) {
      const int local = dofs.local_of(nx0 + lx, ny0 + ly);
      const int slot = local >= 0 ? dofs.interior_index[local] : -1;
      if (slot >= 0) {
        rc.slots.push_back(slot);
        kept_rows.push_back(ly * side + lx);
      }
    }
  }
  rc.y.resize(static_cast<Eigen::Index>(kept_rows.size()), aux.l_star);
  for (std::size_t r = 0; r < kept_rows.size(); ++r)
    rc.y.row(static_cast<Eigen::Index>(r)) = e.weighted_mass.row(kept_rows[r]);
  rc.ys = rc.y * e.signed_gram;
  return rc;
}

void check_inputs(const GridHierarchy& g, const CoefficientField& field, const AuxSpace& aux,
                  int elem, int m) {
  if (aux.fine_n != g.fine_n || aux.coarse_n != g.coarse_n)
    throw DimensionError("cem: auxiliary space built on a different grid");
  if (field.fine_n != g.fine_n) throw DimensionError("cem: field does not match grid");
  if (elem < 0 || elem >= g.n_elem()) throw ConfigError("cem: element index out of range");
  if (m < 0) throw ConfigError("cem: negative oversampling layer count");
}

/// Solves the local problems of one element for all j = 1..l*; returns the
/// interior-slot values, one column per j, in region-local ordering.
Eigen::MatrixXd solve_element_bases(const GridHierarchy& g, const CoefficientField& field,
                                    const AuxSpace& aux, int elem, int m) {
  const Region region = oversample(g, elem, m);
  const LocalDofMap dofs = local_dof_map(g, region);
  const int n_i = dofs.n_interior();
  const int l = aux.l_star;
  const int n_aux = l * region.n_elements();

  const auto a = assemble(g, field, WeightSpec::signed_sigma(), dofs, OperatorKind::Stiffness,
                          Restriction::InteriorOnly);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(a.mat.nonZeros() + 2 * static_cast<std::size_t>(n_aux) * (g.sub_n + 1) *
                                          (g.sub_n + 1) +
                   n_aux);
  for (int k = 0; k < a.mat.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(a.mat, k); it; ++it)
      triplets.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());

  RestrictedCoupling target;
  for (int t = 0; t < region.n_elements(); ++t) {
    const int k_elem = region.elements[t];
    RestrictedCoupling rc = restrict_coupling(g, aux, dofs, k_elem);
    const int off = n_i + t * l;
    for (std::size_t r = 0; r < rc.slots.size(); ++r) {
      for (int jj = 0; jj < l; ++jj) {
        triplets.emplace_back(rc.slots[r], off + jj, rc.y(static_cast<Eigen::Index>(r), jj));
        triplets.emplace_back(off + jj, rc.slots[r], rc.ys(static_cast<Eigen::Index>(r), jj));
      }
    }
    if (k_elem == elem) target = std::move(rc);
  }
  for (int q = 0; q < n_aux; ++q) triplets.emplace_back(n_i + q, n_i + q, -1.0);

  Eigen::SparseMatrix<double> bordered(n_i + n_aux, n_i + n_aux);
  bordered.setFromTriplets(triplets.begin(), triplets.end());
  bordered.makeCompressed();

  Factorization fac;
  try {
    fac = Factorization::factor_general(bordered);
  } catch (const SingularMatrixError& err) {
    throw NumericalError("build_basis: singular local system for element " +
                         std::to_string(elem) + ", m=" + std::to_string(m) +
                         " (bases j=1.." + std::to_string(l) + "): " + err.what());
  }

  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n_i + n_aux, l);
  for (int j = 0; j < l; ++j) {
    const Eigen::VectorXd r = target.ys.col(j);
    for (std::size_t s = 0; s < target.slots.size(); ++s)
      rhs(target.slots[s], j) = r[static_cast<Eigen::Index>(s)];
  }
  return fac.solve(rhs).topRows(n_i);
}

std::uint64_t element_pattern_key(const GridHierarchy& g, const CoefficientField& field,
                                  const Region& region, int elem, int m, int l_star) {
  auto [ex, ey] = g.elem_coords(elem);
  HashStream hs;
  hs.add(g.fine_n);
  hs.add(g.coarse_n);
  hs.add(l_star);
  hs.add(m);
  hs.add(region.elem_width());
  hs.add(region.elem_height());
  hs.add(ex - region.ex0);
  hs.add(ey - region.ey0);
  for (int cy = region.node_y0; cy < region.node_y1; ++cy)
    hs.add_span(&field.values[static_cast<std::size_t>(cy) * g.fine_n + region.node_x0],
                static_cast<std::size_t>(region.node_x1 - region.node_x0));
  return hs.digest();
}

}  // namespace

std::uint64_t basis_provenance(const GridHierarchy& g, const CoefficientField& field, int l_star,
                               int m) {
  HashStream h;
  h.add(aux_provenance(g, field, l_star));
  h.add(m);
  return h.digest();
}

Eigen::VectorXd build_basis(const GridHierarchy& g, const CoefficientField& field,
                            const AuxSpace& aux, int elem, int j, int m) {
  check_inputs(g, field, aux, elem, m);
  if (j < 1 || j > aux.l_star)
    throw ConfigError("build_basis: eigenfunction index j must lie in 1..l*");
  const Eigen::MatrixXd values = solve_element_bases(g, field, aux, elem, m);
  const Region region = oversample(g, elem, m);
  const LocalDofMap dofs = local_dof_map(g, region);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.n_fine_nodes());
  for (int s = 0; s < dofs.n_interior(); ++s)
    out[dofs.to_global[dofs.interior_locals[s]]] = values(s, j - 1);
  return out;
}

Eigen::VectorXd build_basis_explicit_penalty(const GridHierarchy& g,
                                             const CoefficientField& field, const AuxSpace& aux,
                                             int elem, int j, int m) {
  check_inputs(g, field, aux, elem, m);
  if (j < 1 || j > aux.l_star)
    throw ConfigError("build_basis: eigenfunction index j must lie in 1..l*");
  const Region region = oversample(g, elem, m);
  const LocalDofMap dofs = local_dof_map(g, region);
  const int n_i = dofs.n_interior();

  const auto a = assemble(g, field, WeightSpec::signed_sigma(), dofs, OperatorKind::Stiffness,
                          Restriction::InteriorOnly);
  std::vector<Eigen::Triplet<double>> triplets;
  for (int k = 0; k < a.mat.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(a.mat, k); it; ++it)
      triplets.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_i);
  for (int k_elem : region.elements) {
    const RestrictedCoupling rc = restrict_coupling(g, aux, dofs, k_elem);
    const Eigen::MatrixXd block = rc.ys * rc.y.transpose();  // Y S Y^T
    for (std::size_t r1 = 0; r1 < rc.slots.size(); ++r1)
      for (std::size_t r2 = 0; r2 < rc.slots.size(); ++r2)
        triplets.emplace_back(rc.slots[r1], rc.slots[r2],
                              block(static_cast<Eigen::Index>(r1), static_cast<Eigen::Index>(r2)));
    if (k_elem == elem) {
      const Eigen::VectorXd r = rc.ys.col(j - 1);
      for (std::size_t s = 0; s < rc.slots.size(); ++s)
        rhs[rc.slots[s]] = r[static_cast<Eigen::Index>(s)];
    }
  }
  SparseSymMatrix sys;
  sys.mat.resize(n_i, n_i);
  sys.mat.setFromTriplets(triplets.begin(), triplets.end());
  sys.mat.makeCompressed();
  sys.definiteness = Definiteness::Indefinite;

  Factorization fac;
  try {
    fac = Factorization::factor(sys);
  } catch (const SingularMatrixError& err) {
    throw NumericalError("build_basis: singular local system for element " +
                         std::to_string(elem) + ", j=" + std::to_string(j) +
                         ", m=" + std::to_string(m) + ": " + err.what());
  }
  const Eigen::VectorXd x = fac.solve(rhs);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.n_fine_nodes());
  for (int s = 0; s < n_i; ++s) out[dofs.to_global[dofs.interior_locals[s]]] = x[s];
  return out;
}

MsBasisSet build_all(const GridHierarchy& g, const CoefficientField& field, const AuxSpace& aux,
                     int m, int threads) {
  check_inputs(g, field, aux, 0, m);
  MsBasisSet set;
  set.fine_n = g.fine_n;
  set.coarse_n = g.coarse_n;
  set.l_star = aux.l_star;
  set.m = m;
  set.provenance = basis_provenance(g, field, aux.l_star, m);
  set.bases.resize(static_cast<std::size_t>(g.n_elem()) * aux.l_star);

  std::vector<std::uint64_t> keys(g.n_elem());
  std::map<std::uint64_t, int> representative;
  for (int i = 0; i < g.n_elem(); ++i) {
    keys[i] = element_pattern_key(g, field, oversample(g, i, m), i, m, aux.l_star);
    representative.emplace(keys[i], i);
  }
  std::vector<int> unique_elems;
  unique_elems.reserve(representative.size());
  for (const auto& [key, i] : representative) unique_elems.push_back(i);

  std::vector<Eigen::MatrixXd> solved(unique_elems.size());
  parallel_for(static_cast<int>(unique_elems.size()), threads, [&](int u) {
    solved[u] = solve_element_bases(g, field, aux, unique_elems[u], m);
  });
  std::map<std::uint64_t, const Eigen::MatrixXd*> by_key;
  for (std::size_t u = 0; u < unique_elems.size(); ++u)
    by_key[keys[unique_elems[u]]] = &solved[u];

  parallel_for(g.n_elem(), threads, [&](int i) {
    const Eigen::MatrixXd& values = *by_key[keys[i]];
    const Region region = oversample(g, i, m);
    const LocalDofMap dofs = local_dof_map(g, region);
    for (int j = 1; j <= aux.l_star; ++j) {
      MsBasis& basis = set.bases[static_cast<std::size_t>(i) * aux.l_star + (j - 1)];
      basis.elem = i;
      basis.j = j;
      basis.support.resize(dofs.n_interior());
      basis.values.resize(dofs.n_interior());
      for (int s = 0; s < dofs.n_interior(); ++s) {
        basis.support[s] = dofs.to_global[dofs.interior_locals[s]];
        basis.values[s] = values(s, j - 1);
      }
    }
  });
  return set;
}

Eigen::VectorXd scatter_to_global(const GridHierarchy& g, const MsBasis& basis) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.n_fine_nodes());
  for (std::size_t s = 0; s < basis.support.size(); ++s) out[basis.support[s]] = basis.values[s];
  return out;
}

std::vector<DecayPoint> decay_study(const GridHierarchy& g, const CoefficientField& field,
                                    const AuxSpace& aux, int elem, int j,
                                    const std::vector<int>& m_list, int m_ref) {
  if (m_list.empty()) throw ConfigError("decay_study: empty m list");
  if (m_ref <= *std::max_element(m_list.begin(), m_list.end()))
    throw ConfigError("decay_study: m_ref must exceed every entry of m_list");
  const Eigen::VectorXd ref = build_basis(g, field, aux, elem, j, m_ref);
  const double ref_energy = energy_norm(g, field, ref);
  const double ref_l2 = l2_norm(g, ref);
  std::vector<DecayPoint> out;
  out.reserve(m_list.size());
  for (int m : m_list) {
    const Eigen::VectorXd diff = build_basis(g, field, aux, elem, j, m) - ref;
    DecayPoint p;
    p.m = m;
    p.rel_energy_diff = energy_norm(g, field, diff) / ref_energy;
    p.rel_l2_diff = l2_norm(g, diff) / ref_l2;
    out.push_back(p);
  }
  return out;
}

}  // namespace cemsc
