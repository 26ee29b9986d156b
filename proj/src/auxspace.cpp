#include "cemsc/auxspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include <lapacke.h>

namespace cemsc {

namespace {

constexpr double kEigenClamp = 1e-12;

void apply_sign_convention(Eigen::MatrixXd& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    auto col = vectors.col(j);
    const double noise = 1e-12 * col.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < col.size(); ++k) {
      if (std::abs(col[k]) > noise) {
        if (col[k] < 0.0) col = -col;
        break;
      }
    }
  }
}

/// Lowest `want` eigenpairs of the dense symmetric-definite pencil (a, b);
/// eigenvectors returned B-orthonormal. Arguments are clobbered.
void dense_lowest_pairs(Eigen::MatrixXd& a, Eigen::MatrixXd& b, int want,
                        Eigen::VectorXd& values, Eigen::MatrixXd& vectors, int elem) {
  const int n = static_cast<int>(a.rows());
  values.resize(want);
  vectors.resize(n, want);
  std::vector<int> ifail(n, 0);
  int found = 0;
  const double abstol = 2.0 * LAPACKE_dlamch('S');
  const int info = LAPACKE_dsygvx(LAPACK_COL_MAJOR, 1, 'V', 'I', 'L', n, a.data(), n, b.data(),
                                  n, 0.0, 0.0, 1, want, abstol, &found, values.data(),
                                  vectors.data(), n, ifail.data());
  if (info != 0 || found != want)
    throw EigenSolveError("solve_local_eigen: dsygvx failed on element " + std::to_string(elem) +
                              " (info=" + std::to_string(info) + ")",
                          elem);
}

/// B-orthonormalizes the columns of x in place (modified Gram-Schmidt).
void b_orthonormalize(Eigen::MatrixXd& x, const Eigen::SparseMatrix<double>& b) {
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    Eigen::VectorXd bxj = b * x.col(j);
    for (Eigen::Index i = 0; i < j; ++i) {
      const double c = x.col(i).dot(bxj);
      x.col(j) -= c * x.col(i);
      bxj = b * x.col(j);
    }
    const double nrm = std::sqrt(x.col(j).dot(bxj));
    if (nrm > 0.0) x.col(j) /= nrm;
  }
}

/// Shift-inverted block subspace iteration for the lowest `want` eigenpairs of
/// the sparse pencil (a, b) with a positive semidefinite and b positive
/// definite. Deterministic polynomial start basis.
void iterative_lowest_pairs(const Eigen::SparseMatrix<double>& a,
                            const Eigen::SparseMatrix<double>& b, const LocalDofMap& dofs,
                            int want, Eigen::VectorXd& values, Eigen::MatrixXd& vectors,
                            int elem) {
  const Eigen::Index n = a.rows();
  const int block = std::min<Eigen::Index>(n, std::max(2 * want, want + 4));

  const double trace_ratio = a.diagonal().sum() / b.diagonal().sum();
  const double tau = 1e-3 * trace_ratio;
  Eigen::SparseMatrix<double> shifted = a + tau * b;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(shifted);
  if (solver.info() != Eigen::Success)
    throw EigenSolveError("solve_local_eigen: shifted operator not factorizable on element " +
                              std::to_string(elem),
                          elem);

  Eigen::MatrixXd x(n, block);
  const double wx = dofs.width() - 1, wy = dofs.height() - 1;
  for (int j = 0, deg = 0; j < block; ++deg) {
    for (int py = 0; py <= deg && j < block; ++py) {
      const int px = deg - py;
      for (Eigen::Index l = 0; l < n; ++l) {
        const double lx = wx > 0 ? (l % dofs.width()) / wx : 0.0;
        const double ly = wy > 0 ? (l / dofs.width()) / wy : 0.0;
        x(l, j) = std::pow(lx, px) * std::pow(ly, py);
      }
      ++j;
    }
  }
  b_orthonormalize(x, b);

  const double scale_a = a.coeffs().abs().maxCoeff();
  const double scale_b = b.coeffs().abs().maxCoeff();
  values.resize(want);
  vectors.resize(n, want);
  Eigen::VectorXd ritz;
  for (int iter = 0; iter < 300; ++iter) {
    Eigen::MatrixXd z = solver.solve(b * x);
    b_orthonormalize(z, b);
    const Eigen::MatrixXd ar = z.transpose() * (a * z).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(ar);
    ritz = small.eigenvalues();
    x = z * small.eigenvectors();

    bool converged = true;
    for (int j = 0; j < want; ++j) {
      const Eigen::VectorXd r = a * x.col(j) - ritz[j] * (b * x.col(j));
      if (r.norm() > 1e-10 * (scale_a + std::abs(ritz[j]) * scale_b)) {
        converged = false;
        break;
      }
    }
    if (converged) {
      values = ritz.head(want);
      vectors = x.leftCols(want);
      return;
    }
  }
  throw EigenSolveError("solve_local_eigen: subspace iteration did not converge on element " +
                            std::to_string(elem),
                        elem);
}

ElementAux finish_element(const Eigen::VectorXd& raw_values, const Eigen::MatrixXd& raw_vectors,
                          const Eigen::SparseMatrix<double>& b_abs,
                          const Eigen::SparseMatrix<double>& b_signed, int l_star) {
  ElementAux e;
  e.eigenvalues = raw_values;
  for (Eigen::Index i = 0; i < e.eigenvalues.size(); ++i)
    if (e.eigenvalues[i] < kEigenClamp) e.eigenvalues[i] = 0.0;
  e.eigenvectors = raw_vectors.leftCols(l_star);
  apply_sign_convention(e.eigenvectors);
  e.weighted_mass = b_abs * e.eigenvectors;
  e.signed_gram = e.eigenvectors.transpose() * (b_signed * e.eigenvectors).eval();
  e.lambda_star = e.eigenvalues[l_star];
  return e;
}

}  // namespace

double AuxSpace::max_lambda_star() const {
  double m = 0.0;
  for (const auto& e : elements) m = std::max(m, e.lambda_star);
  return m;
}

std::uint64_t aux_provenance(const GridHierarchy& g, const CoefficientField& field, int l_star) {
  HashStream h;
  h.add(g.fine_n);
  h.add(g.coarse_n);
  h.add(l_star);
  h.add(field.content_hash());
  return h.digest();
}

ElementAux solve_local_eigen(const GridHierarchy& g, const CoefficientField& field, int elem,
                             int l_star) {
  const LocalDofMap dofs = element_dof_map(g, elem);
  const int n = dofs.n_local();
  if (l_star < 1 || l_star + 1 > n)
    throw ConfigError("solve_local_eigen: need 1 <= l_star+1 <= " + std::to_string(n));

  const auto a = assemble(g, field, WeightSpec::abs_sigma(), dofs, OperatorKind::Stiffness,
                          Restriction::None);
  const auto b_abs =
      assemble(g, field, WeightSpec::abs_mu(g), dofs, OperatorKind::Mass, Restriction::None);
  const auto b_signed =
      assemble(g, field, WeightSpec::signed_mu(g), dofs, OperatorKind::Mass, Restriction::None);

  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  const int want = l_star + 1;
  if (n <= kDenseEigenMaxDim) {
    Eigen::MatrixXd ad(a.mat);
    Eigen::MatrixXd bd(b_abs.mat);
    dense_lowest_pairs(ad, bd, want, values, vectors, elem);
  } else {
    iterative_lowest_pairs(a.mat, b_abs.mat, dofs, want, values, vectors, elem);
  }
  return finish_element(values, vectors, b_abs.mat, b_signed.mat, l_star);
}

AuxSpace build_aux_space(const GridHierarchy& g, const CoefficientField& field, int l_star,
                         int threads) {
  AuxSpace aux;
  aux.fine_n = g.fine_n;
  aux.coarse_n = g.coarse_n;
  aux.l_star = l_star;
  aux.provenance = aux_provenance(g, field, l_star);
  aux.elements.resize(g.n_elem());

  // Group elements by their local coefficient pattern: identical bytes feed
  // identical assembly and eigensolves, so one representative solve per
  // pattern reproduces the per-element result bit for bit.
  std::vector<std::uint64_t> keys(g.n_elem());
  std::map<std::uint64_t, int> representative;
  for (int i = 0; i < g.n_elem(); ++i) {
    auto [ex, ey] = g.elem_coords(i);
    HashStream hs;
    for (int cy = ey * g.sub_n; cy < (ey + 1) * g.sub_n; ++cy)
      hs.add_span(&field.values[static_cast<std::size_t>(cy) * g.fine_n + ex * g.sub_n],
                  static_cast<std::size_t>(g.sub_n));
    keys[i] = hs.digest();
    representative.emplace(keys[i], i);
  }
  std::vector<int> unique_elems;
  unique_elems.reserve(representative.size());
  for (const auto& [key, i] : representative) unique_elems.push_back(i);

  std::vector<ElementAux> solved(unique_elems.size());
  parallel_for(static_cast<int>(unique_elems.size()), threads,
               [&](int u) { solved[u] = solve_local_eigen(g, field, unique_elems[u], l_star); });

  std::map<std::uint64_t, const ElementAux*> by_key;
  for (std::size_t u = 0; u < unique_elems.size(); ++u)
    by_key[keys[unique_elems[u]]] = &solved[u];
  for (int i = 0; i < g.n_elem(); ++i) aux.elements[i] = *by_key[keys[i]];

  aux.epsilon = 1.0 / aux.max_lambda_star();
  return aux;
}

Projection project(const AuxSpace& aux, const GridHierarchy& g, const Eigen::VectorXd& fine_nodal,
                   const Region* region) {
  if (fine_nodal.size() != g.n_fine_nodes())
    throw DimensionError("project: vector length does not match the fine grid");
  Projection p;
  p.l_star = aux.l_star;
  p.coeffs = Eigen::MatrixXd::Zero(g.n_elem(), aux.l_star);
  const auto project_one = [&](int elem) {
    const LocalDofMap dofs = element_dof_map(g, elem);
    Eigen::VectorXd local(dofs.n_local());
    for (int l = 0; l < dofs.n_local(); ++l) local[l] = fine_nodal[dofs.to_global[l]];
    p.coeffs.row(elem) = (aux.elements[elem].weighted_mass.transpose() * local).transpose();
  };
  if (region) {
    for (int elem : region->elements) project_one(elem);
  } else {
    for (int elem = 0; elem < g.n_elem(); ++elem) project_one(elem);
  }
  return p;
}

Projection project(const AuxSpace& aux, const Projection& p) {
  if (p.l_star != aux.l_star || p.coeffs.rows() != static_cast<Eigen::Index>(aux.elements.size()))
    throw DimensionError("project: projection shape does not match the auxiliary space");
  // psi columns are B-orthonormal, so re-projecting returns the coefficients:
  // Y^T (psi c) = (psi^T B psi) c = c.
  return p;
}

Eigen::VectorXd element_values(const AuxSpace& aux, const GridHierarchy&, const Projection& p,
                               int elem) {
  return aux.elements[elem].eigenvectors * p.coeffs.row(elem).transpose();
}

Eigen::VectorXd projection_to_nodal(const AuxSpace& aux, const GridHierarchy& g,
                                    const Projection& p) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.n_fine_nodes());
  Eigen::VectorXd weight = Eigen::VectorXd::Zero(g.n_fine_nodes());
  for (int elem = 0; elem < g.n_elem(); ++elem) {
    const LocalDofMap dofs = element_dof_map(g, elem);
    const Eigen::VectorXd vals = element_values(aux, g, p, elem);
    for (int l = 0; l < dofs.n_local(); ++l) {
      out[dofs.to_global[l]] += vals[l];
      weight[dofs.to_global[l]] += 1.0;
    }
  }
  for (Eigen::Index i = 0; i < out.size(); ++i)
    if (weight[i] > 0.0) out[i] /= weight[i];
  return out;
}

SpectralReport spectral_statistics(const AuxSpace& aux, const CoefficientField& field) {
  SpectralReport r;
  r.coarse_n = aux.coarse_n;
  r.n_stats = std::min(3, aux.l_star);  // lambda_{2..l*+1}, capped at lambda_4
  r.epsilon = aux.epsilon;
  r.contrast = field.contrast();
  for (int k = 0; k < r.n_stats; ++k) {
    r.lambda_min[k] = std::numeric_limits<double>::infinity();
    r.lambda_max[k] = -std::numeric_limits<double>::infinity();
    for (const auto& e : aux.elements) {
      const double lam = e.eigenvalues[k + 1];
      r.lambda_min[k] = std::min(r.lambda_min[k], lam);
      r.lambda_max[k] = std::max(r.lambda_max[k], lam);
    }
  }
  return r;
}

std::vector<double> signed_eigenvalues_diagnostic(const GridHierarchy& g,
                                                  const CoefficientField& field, int elem,
                                                  int count) {
  const LocalDofMap dofs = element_dof_map(g, elem);
  const auto a = assemble(g, field, WeightSpec::signed_sigma(), dofs, OperatorKind::Stiffness,
                          Restriction::None);
  const auto b =
      assemble(g, field, WeightSpec::signed_mu(g), dofs, OperatorKind::Mass, Restriction::None);
  Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> qz;
  qz.compute(Eigen::MatrixXd(a.mat), Eigen::MatrixXd(b.mat), false);
  std::vector<double> lambdas;
  for (Eigen::Index i = 0; i < qz.alphas().size(); ++i) {
    const auto alpha = qz.alphas()[i];
    const double beta = qz.betas()[i];
    if (std::abs(beta) < 1e-12 || std::abs(alpha.imag()) > 1e-9 * std::abs(alpha.real()))
      continue;
    lambdas.push_back(alpha.real() / beta);
  }
  std::sort(lambdas.begin(), lambdas.end(),
            [](double x, double y) { return std::abs(x) < std::abs(y); });
  if (static_cast<int>(lambdas.size()) > count) lambdas.resize(count);
  return lambdas;
}

}  // namespace cemsc
