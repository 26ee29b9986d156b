#include "cemsc/linsolve.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <lapacke.h>

namespace cemsc {

namespace {

double max_abs_entry(const Eigen::SparseMatrix<double>& a) {
  double m = 0.0;
  for (int k = 0; k < a.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it)
      m = std::max(m, std::abs(it.value()));
  return m;
}

constexpr double kPivotTol = 1e-14;

}  // namespace

Factorization Factorization::factor(const SparseSymMatrix& a) {
  if (a.mat.rows() != a.mat.cols())
    throw DimensionError("Factorization: matrix must be square");
  Factorization f;
  f.rows_ = a.mat.rows();
  const double scale = max_abs_entry(a.mat);

  if (a.definiteness == Definiteness::PositiveDefinite) {
    f.kind_ = Kind::SimplicialLdlt;
    f.ldlt_ = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
    f.ldlt_->compute(a.mat);
    if (f.ldlt_->info() != Eigen::Success)
      throw SingularMatrixError("Factorization: LDLt breakdown on positive-definite tagged matrix", -1);
    Inertia inertia;
    const auto& d = f.ldlt_->vectorD();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      if (std::abs(d[i]) <= kPivotTol * scale)
        throw SingularMatrixError("Factorization: pivot " + std::to_string(i) +
                                      " below tolerance, matrix numerically singular",
                                  i);
      (d[i] > 0.0 ? inertia.positive : inertia.negative)++;
    }
    f.inertia_ = inertia;
    return f;
  }

  if (f.rows_ <= dense_threshold) return factor_dense(Eigen::MatrixXd(a.mat));

  f.kind_ = Kind::SparseLu;
  f.lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
  f.lu_->compute(a.mat);
  if (f.lu_->info() != Eigen::Success)
    throw SingularMatrixError("Factorization: sparse LU failed (matrix singular?)", -1);
  return f;
}

Factorization Factorization::factor_dense(Eigen::MatrixXd a) {
  if (a.rows() != a.cols()) throw DimensionError("Factorization: matrix must be square");
  Factorization f;
  f.rows_ = a.rows();
  const double scale = a.cwiseAbs().maxCoeff();
  f.kind_ = Kind::DenseBunchKaufman;
  f.dense_ = std::make_shared<Eigen::MatrixXd>(std::move(a));
  f.ipiv_ = std::make_shared<std::vector<int>>(f.rows_, 0);
  const int n = static_cast<int>(f.rows_);
  const int info =
      LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', n, f.dense_->data(), n, f.ipiv_->data());
  if (info < 0)
    throw NumericalError("Factorization: dsytrf illegal argument " + std::to_string(-info));
  if (info > 0)
    throw SingularMatrixError("Factorization: exactly singular at pivot " +
                                  std::to_string(info - 1),
                              info - 1);
  // Inertia and near-singularity from the block-diagonal D.
  Inertia inertia;
  const Eigen::MatrixXd& m = *f.dense_;
  const std::vector<int>& ipiv = *f.ipiv_;
  for (int k = 0; k < n;) {
    if (ipiv[k] > 0) {
      const double d = m(k, k);
      if (std::abs(d) <= kPivotTol * scale)
        throw SingularMatrixError("Factorization: pivot " + std::to_string(k) +
                                      " below tolerance, matrix numerically singular",
                                  k);
      (d > 0.0 ? inertia.positive : inertia.negative)++;
      ++k;
    } else {
      const double d11 = m(k, k), d21 = m(k + 1, k), d22 = m(k + 1, k + 1);
      const double mean = 0.5 * (d11 + d22);
      const double radius = std::hypot(0.5 * (d11 - d22), d21);
      const double lo = mean - radius, hi = mean + radius;
      if (std::min(std::abs(lo), std::abs(hi)) <= kPivotTol * scale)
        throw SingularMatrixError("Factorization: 2x2 pivot block at " + std::to_string(k) +
                                      " numerically singular",
                                  k);
      (lo > 0.0 ? inertia.positive : inertia.negative)++;
      (hi > 0.0 ? inertia.positive : inertia.negative)++;
      k += 2;
    }
  }
  f.inertia_ = inertia;
  return f;
}

Factorization Factorization::factor_general(const Eigen::SparseMatrix<double>& a) {
  if (a.rows() != a.cols()) throw DimensionError("Factorization: matrix must be square");
  Factorization f;
  f.rows_ = a.rows();
  f.kind_ = Kind::SparseLu;
  f.lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
  f.lu_->compute(a);
  if (f.lu_->info() != Eigen::Success)
    throw SingularMatrixError("Factorization: sparse LU failed (matrix singular?)", -1);
  return f;
}

Eigen::MatrixXd Factorization::solve(const Eigen::MatrixXd& b) const {
  if (b.rows() != rows_)
    throw DimensionError("Factorization::solve: rhs has " + std::to_string(b.rows()) +
                         " rows, expected " + std::to_string(rows_));
  switch (kind_) {
    case Kind::DenseBunchKaufman: {
      Eigen::MatrixXd x = b;
      const int n = static_cast<int>(rows_);
      const int info =
          LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', n, static_cast<int>(b.cols()), dense_->data(),
                         n, ipiv_->data(), x.data(), n);
      if (info != 0) throw NumericalError("Factorization: dsytrs failed");
      return x;
    }
    case Kind::SimplicialLdlt:
      return ldlt_->solve(b);
    case Kind::SparseLu:
      return lu_->solve(b);
  }
  throw NumericalError("Factorization: uninitialized");
}

Eigen::VectorXd Factorization::solve(const Eigen::VectorXd& b) const {
  return solve(Eigen::MatrixXd(b)).col(0);
}

}  // namespace cemsc
