#include "cemsc/online.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cemsc/assembly.hpp"
#include "cemsc/linsolve.hpp"

namespace cemsc {

Eigen::SparseMatrix<double> global_signed_stiffness(const GridHierarchy& g,
                                                    const CoefficientField& field) {
  const LocalDofMap dofs = local_dof_map(g, whole_domain(g));
  return assemble(g, field, WeightSpec::signed_sigma(), dofs, OperatorKind::Stiffness,
                  Restriction::None)
      .mat;
}

Eigen::VectorXd global_load(const GridHierarchy& g, const SourceField& f) {
  const LocalDofMap dofs = local_dof_map(g, whole_domain(g));
  return assemble_load(g, f, dofs, Restriction::None);
}

namespace {

/// Regions of two elements overlap iff the clipped coarse boxes intersect.
bool regions_overlap(const GridHierarchy& g, int e1, int e2, int m) {
  auto [x1, y1] = g.elem_coords(e1);
  auto [x2, y2] = g.elem_coords(e2);
  const auto clip = [&](int c) { return std::pair(std::max(0, c - m), std::min(g.coarse_n - 1, c + m)); };
  const auto [lx1, hx1] = clip(x1);
  const auto [lx2, hx2] = clip(x2);
  const auto [ly1, hy1] = clip(y1);
  const auto [ly2, hy2] = clip(y2);
  return std::max(lx1, lx2) <= std::min(hx1, hx2) && std::max(ly1, ly2) <= std::min(hy1, hy2);
}

struct Entry {
  int p, q;
  double value;
};

}  // namespace

CoarseSystem assemble_online(const GridHierarchy& g, const CoefficientField& field,
                             const MsBasisSet& bases, const SourceField& f, int threads) {
  return assemble_online(g, field, bases, global_signed_stiffness(g, field), global_load(g, f),
                         threads);
}

CoarseSystem assemble_online(const GridHierarchy& g, const CoefficientField& field,
                             const MsBasisSet& bases,
                             const Eigen::SparseMatrix<double>& a_signed_full,
                             const Eigen::VectorXd& load_full, int threads) {
  if (bases.provenance != basis_provenance(g, field, bases.l_star, bases.m))
    throw ConfigError("assemble_online: basis set provenance does not match grid/field");
  if (a_signed_full.rows() != g.n_fine_nodes() || load_full.size() != g.n_fine_nodes())
    throw DimensionError("assemble_online: fine operators do not match the grid");

  CoarseSystem cs;
  cs.coarse_n = g.coarse_n;
  cs.l_star = bases.l_star;
  cs.m = bases.m;
  cs.n = g.n_elem() * bases.l_star;
  cs.dense = cs.n <= CoarseSystem::dense_limit;
  cs.rhs.resize(cs.n);

  const int l = bases.l_star;
  // Per-element entry buffers keep the assembly order (and hence the result)
  // independent of the thread schedule.
  std::vector<std::vector<Entry>> buffers(g.n_elem());

  parallel_for(g.n_elem(), threads, [&](int i1) {
    thread_local Eigen::VectorXd scratch;
    thread_local std::vector<int> touched;
    if (scratch.size() != g.n_fine_nodes()) scratch = Eigen::VectorXd::Zero(g.n_fine_nodes());

    auto& out = buffers[i1];
    for (int j1 = 0; j1 < l; ++j1) {
      const int p = i1 * l + j1;
      const MsBasis& bp = bases.basis(p);
      // w = A * phi_p on the (one-ring dilated) support.
      touched.clear();
      for (std::size_t s = 0; s < bp.support.size(); ++s) {
        const double v = bp.values[s];
        if (v == 0.0) continue;
        const int col = bp.support[s];
        for (Eigen::SparseMatrix<double>::InnerIterator it(a_signed_full, col); it; ++it) {
          if (scratch[it.row()] == 0.0) touched.push_back(static_cast<int>(it.row()));
          scratch[it.row()] += it.value() * v;
        }
      }
      auto [ex1, ey1] = g.elem_coords(i1);
      for (int ey2 = std::max(0, ey1 - 2 * bases.m); ey2 <= std::min(g.coarse_n - 1, ey1 + 2 * bases.m); ++ey2) {
       for (int ex2 = std::max(0, ex1 - 2 * bases.m); ex2 <= std::min(g.coarse_n - 1, ex1 + 2 * bases.m); ++ex2) {
        const int i2 = g.elem_id(ex2, ey2);
        if (i2 < i1 || !regions_overlap(g, i1, i2, bases.m)) continue;
        for (int j2 = (i2 == i1 ? j1 : 0); j2 < l; ++j2) {
          const int q = i2 * l + j2;
          const MsBasis& bq = bases.basis(q);
          double dot = 0.0;
          for (std::size_t s = 0; s < bq.support.size(); ++s)
            dot += scratch[bq.support[s]] * bq.values[s];
          out.push_back({p, q, dot});
        }
       }
      }
      for (int t : touched) scratch[t] = 0.0;
    }
  });

  for (int p = 0; p < cs.n; ++p) {
    const MsBasis& bp = bases.basis(p);
    double dot = 0.0;
    for (std::size_t s = 0; s < bp.support.size(); ++s)
      dot += load_full[bp.support[s]] * bp.values[s];
    cs.rhs[p] = dot;
  }

  if (cs.dense) {
    cs.g_dense = Eigen::MatrixXd::Zero(cs.n, cs.n);
    for (const auto& buf : buffers)
      for (const Entry& e : buf) {
        cs.g_dense(e.p, e.q) = e.value;
        cs.g_dense(e.q, e.p) = e.value;
      }
  } else {
    std::vector<Eigen::Triplet<double>> triplets;
    std::size_t total = 0;
    for (const auto& buf : buffers) total += buf.size();
    triplets.reserve(2 * total);
    for (const auto& buf : buffers)
      for (const Entry& e : buf) {
        triplets.emplace_back(e.p, e.q, e.value);
        if (e.q != e.p) triplets.emplace_back(e.q, e.p, e.value);
      }
    cs.g_sparse.resize(cs.n, cs.n);
    cs.g_sparse.setFromTriplets(triplets.begin(), triplets.end());
    cs.g_sparse.makeCompressed();
  }
  return cs;
}

namespace {

constexpr double kOnlineResidualTol = 1e-6;

void check_residual(double rel, const char* what) {
  if (!(rel <= kOnlineResidualTol))
    throw NumericalError(std::string(what) +
                         ": solve residual " + format_double(rel) +
                         " too large, coarse system singular or unstable");
}

}  // namespace

Solution solve_online(const CoarseSystem& cs, const GridHierarchy& g, const MsBasisSet& bases) {
  if (cs.n != bases.count())
    throw DimensionError("solve_online: system size does not match basis count");
  Solution sol;
  sol.n_dofs = cs.n;
  const double rhs_norm = cs.rhs.norm();
  if (rhs_norm == 0.0) {
    sol.coarse_coeffs = Eigen::VectorXd::Zero(cs.n);
  } else if (cs.dense) {
    Factorization fac;
    try {
      fac = Factorization::factor_dense(cs.g_dense);
    } catch (const SingularMatrixError& err) {
      throw NumericalError(std::string("solve_online: singular coarse system: ") + err.what());
    }
    sol.coarse_coeffs = fac.solve(cs.rhs);
    check_residual((cs.g_dense * sol.coarse_coeffs - cs.rhs).norm() / rhs_norm, "solve_online");
  } else {
    Factorization fac;
    try {
      fac = Factorization::factor_general(cs.g_sparse);
    } catch (const SingularMatrixError& err) {
      throw NumericalError(std::string("solve_online: singular coarse system: ") + err.what());
    }
    sol.coarse_coeffs = fac.solve(cs.rhs);
    check_residual((cs.g_sparse * sol.coarse_coeffs - cs.rhs).norm() / rhs_norm, "solve_online");
  }

  sol.fine = Eigen::VectorXd::Zero(g.n_fine_nodes());
  for (int p = 0; p < cs.n; ++p) {
    const double c = sol.coarse_coeffs[p];
    if (c == 0.0) continue;
    const MsBasis& b = bases.basis(p);
    for (std::size_t s = 0; s < b.support.size(); ++s) sol.fine[b.support[s]] += c * b.values[s];
  }
  return sol;
}

Solution solve_reference(const GridHierarchy& g, const CoefficientField& field,
                         const SourceField& f) {
  const LocalDofMap dofs = local_dof_map(g, whole_domain(g));
  const auto a = assemble(g, field, WeightSpec::signed_sigma(), dofs, OperatorKind::Stiffness,
                          Restriction::InteriorOnly);
  const Eigen::VectorXd b = assemble_load(g, f, dofs, Restriction::InteriorOnly);
  const Factorization fac = Factorization::factor(a);
  const Eigen::VectorXd x = fac.solve(b);
  Solution sol;
  sol.n_dofs = dofs.n_interior();
  sol.fine = Eigen::VectorXd::Zero(g.n_fine_nodes());
  for (int s = 0; s < dofs.n_interior(); ++s)
    sol.fine[dofs.to_global[dofs.interior_locals[s]]] = x[s];
  return sol;
}

Eigen::VectorXd interpolate_exact(const GridHierarchy& g, const ExactSolution& e) {
  Eigen::VectorXd u(g.n_fine_nodes());
  for (int iy = 0; iy <= g.fine_n; ++iy)
    for (int ix = 0; ix <= g.fine_n; ++ix)
      u[g.node_id(ix, iy)] = e.u(g.node_x(ix), g.node_y(iy));
  return u;
}

Solution q1_coarse_solution(const GridHierarchy& g, const CoefficientField& field,
                            const SourceField& f) {
  if (field.fine_n != g.fine_n) throw DimensionError("q1_coarse_solution: field/grid mismatch");
  const int c = g.coarse_n;
  const int nodes = (c + 1) * (c + 1);
  const auto cnode = [c](int ix, int iy) { return iy * (c + 1) + ix; };

  // Exact stiffness contribution of each fine subcell against the coarse Q1
  // shapes: 2x2 Gauss per subcell integrates the bilinear-gradient products
  // exactly.
  const int sn = g.sub_n;
  std::vector<Eigen::Matrix4d> sub(static_cast<std::size_t>(sn) * sn, Eigen::Matrix4d::Zero());
  const double gp[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
  for (int sy = 0; sy < sn; ++sy) {
    for (int sx = 0; sx < sn; ++sx) {
      Eigen::Matrix4d e = Eigen::Matrix4d::Zero();
      for (int qy = 0; qy < 2; ++qy) {
        for (int qx = 0; qx < 2; ++qx) {
          const double xi = (sx + gp[qx]) / sn;   // coarse reference coords in [0,1]
          const double eta = (sy + gp[qy]) / sn;
          // gradients of the coarse bilinear shapes, reference cell [0,1]^2
          const double dxi[4] = {-(1 - eta), (1 - eta), eta, -eta};
          const double deta[4] = {-(1 - xi), -xi, xi, (1 - xi)};
          const double w = 0.25 * g.h * g.h;  // subcell area / 4 gauss points
          for (int aa = 0; aa < 4; ++aa)
            for (int bb = 0; bb < 4; ++bb)
              e(aa, bb) += w * (dxi[aa] * dxi[bb] + deta[aa] * deta[bb]) / (g.H * g.H);
        }
      }
      sub[static_cast<std::size_t>(sy) * sn + sx] = e;
    }
  }

  std::vector<int> interior(nodes, -1);
  int n_int = 0;
  for (int iy = 1; iy < c; ++iy)
    for (int ix = 1; ix < c; ++ix) interior[cnode(ix, iy)] = n_int++;

  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n_int);
  const Eigen::Matrix4d mass = local_q1_mass(g.H);
  for (int ey = 0; ey < c; ++ey) {
    for (int ex = 0; ex < c; ++ex) {
      Eigen::Matrix4d k = Eigen::Matrix4d::Zero();
      for (int sy = 0; sy < sn; ++sy)
        for (int sx = 0; sx < sn; ++sx)
          k += field.at(ex * sn + sx, ey * sn + sy) * sub[static_cast<std::size_t>(sy) * sn + sx];
      const int corners[4] = {cnode(ex, ey), cnode(ex + 1, ey), cnode(ex + 1, ey + 1),
                              cnode(ex, ey + 1)};
      const int fine_corners[4] = {g.node_id(ex * sn, ey * sn), g.node_id((ex + 1) * sn, ey * sn),
                                   g.node_id((ex + 1) * sn, (ey + 1) * sn),
                                   g.node_id(ex * sn, (ey + 1) * sn)};
      for (int aa = 0; aa < 4; ++aa) {
        const int ra = interior[corners[aa]];
        if (ra < 0) continue;
        double load = 0.0;
        for (int bb = 0; bb < 4; ++bb) {
          load += mass(aa, bb) * f.values[fine_corners[bb]];
          const int rb = interior[corners[bb]];
          if (rb >= 0) triplets.emplace_back(ra, rb, k(aa, bb));
        }
        b[ra] += load;
      }
    }
  }
  SparseSymMatrix sys;
  sys.mat.resize(n_int, n_int);
  sys.mat.setFromTriplets(triplets.begin(), triplets.end());
  sys.mat.makeCompressed();
  sys.definiteness = field.has_negative ? Definiteness::Indefinite : Definiteness::PositiveDefinite;
  const Factorization fac = Factorization::factor(sys);
  const Eigen::VectorXd x = fac.solve(b);

  Eigen::VectorXd coarse = Eigen::VectorXd::Zero(nodes);
  for (int iy = 1; iy < c; ++iy)
    for (int ix = 1; ix < c; ++ix) coarse[cnode(ix, iy)] = x[interior[cnode(ix, iy)]];

  Solution sol;
  sol.n_dofs = n_int;
  sol.fine = Eigen::VectorXd::Zero(g.n_fine_nodes());
  for (int iy = 0; iy <= g.fine_n; ++iy) {
    const int ey = std::min(iy / sn, c - 1);
    const double eta = (static_cast<double>(iy) - ey * sn) / sn;
    for (int ix = 0; ix <= g.fine_n; ++ix) {
      const int ex = std::min(ix / sn, c - 1);
      const double xi = (static_cast<double>(ix) - ex * sn) / sn;
      const double v00 = coarse[cnode(ex, ey)];
      const double v10 = coarse[cnode(ex + 1, ey)];
      const double v11 = coarse[cnode(ex + 1, ey + 1)];
      const double v01 = coarse[cnode(ex, ey + 1)];
      sol.fine[g.node_id(ix, iy)] = v00 * (1 - xi) * (1 - eta) + v10 * xi * (1 - eta) +
                                    v11 * xi * eta + v01 * (1 - xi) * eta;
    }
  }
  return sol;
}

}  // namespace cemsc
