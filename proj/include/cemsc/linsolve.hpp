#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <optional>

#include "cemsc/assembly.hpp"

namespace cemsc {

struct Inertia {
  int positive = 0;
  int negative = 0;
  int zero = 0;
};

/// Direct factorization of sparse symmetric systems, indefinite ones included.
/// Backend is picked from the definiteness tag and size: Cholesky-type LDLt
/// for positive-definite matrices, Bunch-Kaufman (dense) for small indefinite
/// ones where it also yields the inertia, and pivoted sparse LU for the rest.
/// Immutable after construction; concurrent solves are allowed.
class Factorization {
 public:
  static Factorization factor(const SparseSymMatrix& a);

  /// LU path for general (possibly unsymmetric) sparse systems; used by the
  /// bordered local problems of the basis construction.
  static Factorization factor_general(const Eigen::SparseMatrix<double>& a);

  /// Bunch-Kaufman on an already-dense symmetric matrix (any size).
  static Factorization factor_dense(Eigen::MatrixXd a);

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;

  /// Pivot sign counts when the backend exposes them (empty for sparse LU).
  std::optional<Inertia> inertia() const { return inertia_; }

  Eigen::Index rows() const { return rows_; }

  /// Largest dimension routed to the dense Bunch-Kaufman backend.
  static constexpr Eigen::Index dense_threshold = 1024;

 private:
  enum class Kind { DenseBunchKaufman, SimplicialLdlt, SparseLu };

  Kind kind_ = Kind::SparseLu;
  Eigen::Index rows_ = 0;
  std::optional<Inertia> inertia_;

  // Bunch-Kaufman storage (column-major factor + pivots).
  std::shared_ptr<Eigen::MatrixXd> dense_;
  std::shared_ptr<std::vector<int>> ipiv_;

  std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt_;
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
};

}  // namespace cemsc
