#include <doctest.h>

#include <cmath>
#include <random>

#include "cemsc/assembly.hpp"
#include "cemsc/linsolve.hpp"

using namespace cemsc;

namespace {

/// Quadrature oracle: 3x3 Gauss-Legendre on the unit square, exact for the
/// bilinear shape products (degree <= 2 per variable).
Eigen::Matrix4d q1_matrix_by_quadrature(bool stiffness, double h) {
  const double p = std::sqrt(3.0 / 5.0);
  const double pts[3] = {0.5 * (1 - p), 0.5, 0.5 * (1 + p)};
  const double wts[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  auto shape = [](int a, double x, double y) {
    switch (a) {
      case 0: return (1 - x) * (1 - y);
      case 1: return x * (1 - y);
      case 2: return x * y;
      default: return (1 - x) * y;
    }
  };
  auto grad = [](int a, double x, double y) {
    switch (a) {
      case 0: return std::pair{-(1 - y), -(1 - x)};
      case 1: return std::pair{1 - y, -x};
      case 2: return std::pair{y, x};
      default: return std::pair{-y, 1 - x};
    }
  };
  Eigen::Matrix4d out = Eigen::Matrix4d::Zero();
  for (int qx = 0; qx < 3; ++qx)
    for (int qy = 0; qy < 3; ++qy) {
      const double x = pts[qx], y = pts[qy], w = wts[qx] * wts[qy];
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          if (stiffness) {
            // reference gradients scale by 1/h, area element by h^2
            auto [gax, gay] = grad(a, x, y);
            auto [gbx, gby] = grad(b, x, y);
            out(a, b) += w * (gax * gbx + gay * gby);
          } else {
            out(a, b) += w * h * h * shape(a, x, y) * shape(b, x, y);
          }
        }
    }
  return out;
}

Eigen::VectorXd random_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v[i] = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
  return v;
}

}  // namespace

TEST_CASE("local Q1 stiffness matches the quadrature oracle") {
  const Eigen::Matrix4d k = local_q1_stiffness(0.37);
  const Eigen::Matrix4d oracle = q1_matrix_by_quadrature(true, 0.37);
  CHECK((k - oracle).cwiseAbs().maxCoeff() < 1e-14);
  for (int a = 0; a < 4; ++a) {
    CHECK(k(a, a) == doctest::Approx(2.0 / 3.0));
    CHECK(k.row(a).sum() == doctest::Approx(0.0).epsilon(1e-14));
  }
  CHECK(k(0, 2) == doctest::Approx(-1.0 / 3.0));
  CHECK(k(1, 3) == doctest::Approx(-1.0 / 3.0));
  CHECK(k(0, 1) == doctest::Approx(-1.0 / 6.0));
  CHECK(k(0, 3) == doctest::Approx(-1.0 / 6.0));
}

TEST_CASE("local Q1 mass matches the quadrature oracle") {
  const double h = 0.21;
  const Eigen::Matrix4d m = local_q1_mass(h);
  const Eigen::Matrix4d oracle = q1_matrix_by_quadrature(false, h);
  CHECK((m - oracle).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(m.sum() == doctest::Approx(h * h));
  for (int a = 0; a < 4; ++a) CHECK(m(a, a) == doctest::Approx(h * h / 9.0));
  // invariant under the square's rotation (cyclic corner shift)
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      CHECK(m(a, b) == doctest::Approx(m((a + 1) % 4, (b + 1) % 4)));
}

TEST_CASE("assembled laplacian reproduces the first Dirichlet eigenvalue") {
  const GridHierarchy g = build_hierarchy(32, 4);
  const CoefficientField field = constant_field(32, 1.0);
  const LocalDofMap dofs = local_dof_map(g, whole_domain(g));
  const auto a =
      assemble(g, field, WeightSpec::unit(), dofs, OperatorKind::Stiffness, Restriction::InteriorOnly);
  const auto m =
      assemble(g, field, WeightSpec::unit(), dofs, OperatorKind::Mass, Restriction::InteriorOnly);
  CHECK(a.definiteness == Definiteness::PositiveDefinite);
  Eigen::VectorXd v(dofs.n_interior());
  for (int s = 0; s < dofs.n_interior(); ++s) {
    auto [ix, iy] = g.node_coords(dofs.to_global[dofs.interior_locals[s]]);
    v[s] = std::sin(M_PI * g.node_x(ix)) * std::sin(M_PI * g.node_y(iy));
  }
  const double rayleigh = v.dot(a.mat * v) / v.dot(m.mat * v);
  CHECK(rayleigh == doctest::Approx(2.0 * M_PI * M_PI).epsilon(0.01));
}

TEST_CASE("sign-changing stiffness is indefinite") {
  const GridHierarchy g = build_hierarchy(16, 4);
  const auto [field, exact] = flat_interface(g, 0.5, 1.0, 0.5);
  const LocalDofMap dofs = local_dof_map(g, whole_domain(g));
  const auto a = assemble(g, field, WeightSpec::signed_sigma(), dofs, OperatorKind::Stiffness,
                          Restriction::InteriorOnly);
  CHECK(a.definiteness == Definiteness::Indefinite);
  const Factorization f = Factorization::factor(a);
  REQUIRE(f.inertia().has_value());
  CHECK(f.inertia()->positive > 0);
  CHECK(f.inertia()->negative > 0);
}

TEST_CASE("abs-mu mass of one coarse element integrates to 24") {
  const GridHierarchy g = build_hierarchy(40, 10);
  const CoefficientField field = constant_field(40, 1.0);
  const LocalDofMap dofs = element_dof_map(g, g.elem_id(3, 7));
  const auto b =
      assemble(g, field, WeightSpec::abs_mu(g), dofs, OperatorKind::Mass, Restriction::None);
  CHECK(b.definiteness == Definiteness::PositiveDefinite);
  // total mass = 24 H^-2 * H^2
  CHECK(b.mat.sum() == doctest::Approx(24.0).epsilon(1e-12));
}

TEST_CASE("assembly is additive over the coarse elements") {
  const GridHierarchy g = build_hierarchy(12, 3);
  const CoefficientField field = random_inclusions(g, 3, 10, {1, 4}, 1.0, 0.2);
  const LocalDofMap all = local_dof_map(g, whole_domain(g));
  const auto full = assemble(g, field, WeightSpec::signed_sigma(), all, OperatorKind::Stiffness,
                             Restriction::None);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(all.n_local(), all.n_local());
  for (int e = 0; e < g.n_elem(); ++e) {
    const LocalDofMap dofs = element_dof_map(g, e);
    const auto part = assemble(g, field, WeightSpec::signed_sigma(), dofs,
                               OperatorKind::Stiffness, Restriction::None);
    for (int k = 0; k < part.mat.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(part.mat, k); it; ++it)
        sum(dofs.to_global[it.row()], dofs.to_global[it.col()]) += it.value();
  }
  CHECK((Eigen::MatrixXd(full.mat) - sum).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("scaling the coefficient scales the signed stiffness exactly") {
  const GridHierarchy g = build_hierarchy(16, 4);
  const CoefficientField field = random_inclusions(g, 11, 6, {2, 5}, 1.0, 0.3);
  const CoefficientField twice = scaled(field, 2.0);
  const LocalDofMap dofs = local_dof_map(g, whole_domain(g));
  const auto a1 = assemble(g, field, WeightSpec::signed_sigma(), dofs, OperatorKind::Stiffness,
                           Restriction::InteriorOnly);
  const auto a2 = assemble(g, twice, WeightSpec::signed_sigma(), dofs, OperatorKind::Stiffness,
                           Restriction::InteriorOnly);
  // multiplication by 2 is exact in floating point
  CHECK((Eigen::MatrixXd(a2.mat) - 2.0 * Eigen::MatrixXd(a1.mat)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Neumann abs stiffness annihilates constants") {
  const GridHierarchy g = build_hierarchy(20, 5);
  const CoefficientField field = periodic_square(g, 5, 1.0, 10.0);
  const LocalDofMap dofs = element_dof_map(g, 7);
  const auto a = assemble(g, field, WeightSpec::abs_sigma(), dofs, OperatorKind::Stiffness,
                          Restriction::None);
  CHECK(a.definiteness == Definiteness::PositiveSemidefinite);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(dofs.n_local());
  const double scale = Eigen::MatrixXd(a.mat).cwiseAbs().maxCoeff();
  CHECK((a.mat * ones).cwiseAbs().maxCoeff() <= 1e-12 * scale);
}

TEST_CASE("signed-mu mass equals +- abs-mu mass on single-sign elements") {
  const GridHierarchy g = build_hierarchy(16, 4);
  const auto [field, exact] = flat_interface(g, 0.5, 2.0, 0.7);
  for (int e : {0, 5, 10, 15}) {
    const LocalDofMap dofs = element_dof_map(g, e);
    const auto sgn =
        assemble(g, field, WeightSpec::signed_mu(g), dofs, OperatorKind::Mass, Restriction::None);
    const auto abs =
        assemble(g, field, WeightSpec::abs_mu(g), dofs, OperatorKind::Mass, Restriction::None);
    auto [ex, ey] = g.elem_coords(e);
    const double sign = field.at(ex * g.sub_n, ey * g.sub_n) > 0 ? 1.0 : -1.0;
    CHECK((Eigen::MatrixXd(sgn.mat) - sign * Eigen::MatrixXd(abs.mat)).cwiseAbs().maxCoeff() ==
          0.0);
  }
}

TEST_CASE("assembled matrices are value-symmetric") {
  const GridHierarchy g = build_hierarchy(18, 3);
  const CoefficientField field = random_inclusions(g, 2, 8, {2, 6}, 1.0, 100.0);
  const LocalDofMap dofs = local_dof_map(g, oversample(g, 4, 1));
  for (auto op : {OperatorKind::Stiffness, OperatorKind::Mass}) {
    const auto a =
        assemble(g, field, WeightSpec::signed_sigma(), dofs, op, Restriction::InteriorOnly);
    const Eigen::MatrixXd d(a.mat);
    CHECK((d - d.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * d.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("load vector integrates a constant source to the area") {
  const GridHierarchy g = build_hierarchy(24, 4);
  const CoefficientField field = constant_field(24, 1.0);
  const SourceField one = nodal_source(g, [](double, double) { return 1.0; });
  const LocalDofMap dofs = local_dof_map(g, whole_domain(g));
  const Eigen::VectorXd b = assemble_load(g, one, dofs, Restriction::None);
  CHECK(b.sum() == doctest::Approx(1.0).epsilon(1e-13));

  const SourceField zero = nodal_source(g, [](double, double) { return 0.0; });
  CHECK(assemble_load(g, zero, dofs, Restriction::None).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("load of a nodal indicator is a mass-matrix column") {
  const GridHierarchy g = build_hierarchy(8, 2);
  const CoefficientField field = constant_field(8, 1.0);
  const LocalDofMap dofs = local_dof_map(g, whole_domain(g));
  const auto m =
      assemble(g, field, WeightSpec::unit(), dofs, OperatorKind::Mass, Restriction::None);
  SourceField hat;
  hat.fine_n = 8;
  hat.values.assign(g.n_fine_nodes(), 0.0);
  const int node = g.node_id(4, 3);
  hat.values[node] = 1.0;
  const Eigen::VectorXd b = assemble_load(g, hat, dofs, Restriction::None);
  const Eigen::VectorXd col = Eigen::VectorXd(m.mat.col(node));
  CHECK((b - col).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("assemble rejects a mismatched field") {
  const GridHierarchy g = build_hierarchy(8, 2);
  const CoefficientField field = constant_field(16, 1.0);
  const LocalDofMap dofs = local_dof_map(g, whole_domain(g));
  CHECK_THROWS_AS(assemble(g, field, WeightSpec::unit(), dofs, OperatorKind::Mass,
                           Restriction::None),
                  DimensionError);
}

TEST_CASE("energy inner-product expansion identity") {
  const GridHierarchy g = build_hierarchy(16, 4);
  const CoefficientField field = periodic_square(g, 4, 1.0, 0.1);
  const LocalDofMap dofs = local_dof_map(g, whole_domain(g));
  const auto a = assemble(g, field, WeightSpec::abs_sigma(), dofs, OperatorKind::Stiffness,
                          Restriction::None);
  const Eigen::VectorXd v = random_vector(dofs.n_local(), 1);
  const Eigen::VectorXd w = random_vector(dofs.n_local(), 2);
  const double lhs = (v + w).dot(a.mat * (v + w));
  const double rhs = v.dot(a.mat * v) + 2.0 * v.dot(a.mat * w) + w.dot(a.mat * w);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}
