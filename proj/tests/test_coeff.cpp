#include <doctest.h>

#include <cmath>
#include <random>

#include "cemsc/coeff.hpp"

using namespace cemsc;

namespace {
const GridHierarchy g400 = build_hierarchy(400, 10);
}

TEST_CASE("flat interface splits the cell rows at gamma") {
  const auto [field, exact] = flat_interface(g400, 0.5, 1.0, 1.0);
  int negative_rows = 0;
  for (int cy = 0; cy < 400; ++cy)
    if (field.at(0, cy) < 0.0) ++negative_rows;
  CHECK(negative_rows == 200);
  // rows are constant
  for (int cy = 0; cy < 400; cy += 37)
    for (int cx = 1; cx < 400; cx += 53) CHECK(field.at(cx, cy) == field.at(0, cy));
  CHECK(field.sigma_plus_max == 1.0);
  CHECK(field.sigma_minus_max == 1.0);
}

TEST_CASE("flat interface rejects gamma outside (0,1)") {
  CHECK_THROWS_AS(flat_interface(g400, 0.0, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(flat_interface(g400, 1.0, 1.0, 1.0), ConfigError);
}

TEST_CASE("exact solution vanishes on the interface and the boundary") {
  const auto [field, exact] = flat_interface(g400, 0.49, 1.0, 1.01);
  for (double x1 : {0.1, 0.33, 0.5, 0.9}) {
    CHECK(exact.u(x1, exact.gamma) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(exact.u(x1, 0.0) == doctest::Approx(0.0));
    CHECK(exact.u(x1, 1.0) == doctest::Approx(0.0));
    CHECK(exact.u(0.0, x1) == doctest::Approx(0.0));
    CHECK(exact.u(1.0, x1) == doctest::Approx(0.0));
  }
}

TEST_CASE("exact solution satisfies the PDE on both subdomains") {
  // residual -div(sigma grad u) - f via central finite differences of the
  // closed forms, checked away from the interface
  const auto [field, exact] = flat_interface(g400, 0.49, 1.3, 0.7);
  std::mt19937_64 rng(42);
  auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  const double d = 1e-5;
  for (int k = 0; k < 100; ++k) {
    const bool upper = k % 2 == 0;
    const double x1 = uniform(0.1, 0.9);
    const double x2 = upper ? uniform(exact.gamma + 0.05, 0.95) : uniform(0.05, exact.gamma - 0.05);
    const double sigma = upper ? exact.sigma_plus : -exact.sigma_minus;
    const double lap = (exact.u(x1 + d, x2) + exact.u(x1 - d, x2) + exact.u(x1, x2 + d) +
                        exact.u(x1, x2 - d) - 4.0 * exact.u(x1, x2)) /
                       (d * d);
    const double residual = -sigma * lap - exact.f(x1, x2);
    CHECK(std::abs(residual) < 1e-5);  // FD truncation dominates
  }
}

TEST_CASE("exact solution flux is continuous across the interface") {
  const auto [field, exact] = flat_interface(g400, 0.37, 2.5, 0.4);
  std::mt19937_64 rng(7);
  for (int k = 0; k < 50; ++k) {
    const double x1 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const double flux_plus = exact.sigma_plus * exact.du_dx2(x1, exact.gamma + 1e-13);
    const double flux_minus = -exact.sigma_minus * exact.du_dx2(x1, exact.gamma - 1e-13);
    CHECK(flux_plus == doctest::Approx(flux_minus).epsilon(1e-9));
  }
}

TEST_CASE("exact solution spot value") {
  const auto [field, exact] = flat_interface(g400, 0.5, 1.0, 1.0);
  // direct evaluation of the closed form: -1 * (0.5)(-0.5) * (0.75)(-0.25) * 0.25
  CHECK(exact.u(0.5, 0.75) == doctest::Approx(-3.0 / 256.0).epsilon(1e-14));
}

TEST_CASE("flat_wellposed classifies the contrast band") {
  CHECK(flat_wellposed(0.5, 1.01, 1.0));
  CHECK_FALSE(flat_wellposed(0.5, 1.0, 1.0));
  CHECK_FALSE(flat_wellposed(0.25, 1.0, 0.5));
  CHECK(flat_wellposed(0.49, 1.0, 1.01));
  // gamma > 1/2 swaps the band
  CHECK(flat_wellposed(0.75, 1.0, 0.5));
  CHECK_FALSE(flat_wellposed(0.75, 1.0, 2.0));
}

TEST_CASE("periodic square inclusion geometry") {
  const CoefficientField f = periodic_square(g400, 10, 1.0, 0.1);
  // each 40x40 cell has a centered 20x20 negative block
  for (int cy = 0; cy < 40; ++cy)
    for (int cx = 0; cx < 40; ++cx) {
      const bool inside = cx >= 10 && cx < 30 && cy >= 10 && cy < 30;
      CHECK(f.at(cx, cy) == (inside ? -0.1 : 1.0));
    }
  CHECK(f.negative_area_fraction() == doctest::Approx(0.25));
  CHECK(f.contrast() == doctest::Approx(10.0));
}

TEST_CASE("periodic square 20x20 configuration") {
  const CoefficientField f = periodic_square(g400, 20, 1.0, 0.1);
  int neg = 0;
  for (int cy = 0; cy < 20; ++cy)
    for (int cx = 0; cx < 20; ++cx)
      if (f.at(cx, cy) < 0) ++neg;
  CHECK(neg == 100);  // 10x10 block per 20x20 cell
  CHECK(f.negative_area_fraction() == doctest::Approx(0.25));
}

TEST_CASE("periodic fields are invariant under one-cell translation") {
  const CoefficientField sq = periodic_square(g400, 10, 1.0, 0.1);
  const CoefficientField cr = periodic_cross(g400, 10, 1.0, 1000.0);
  for (int cy = 0; cy < 360; cy += 7)
    for (int cx = 0; cx < 360; cx += 11) {
      CHECK(sq.at(cx, cy) == sq.at(cx + 40, cy));
      CHECK(sq.at(cx, cy) == sq.at(cx, cy + 40));
      CHECK(cr.at(cx, cy) == cr.at(cx + 40, cy));
      CHECK(cr.at(cx, cy) == cr.at(cx, cy + 40));
    }
}

TEST_CASE("periodic models reject a non-resolving fine mesh") {
  CHECK_THROWS_AS(periodic_square(g400, 7, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(periodic_cross(g400, 3, 1.0, 1.0), ConfigError);
}

TEST_CASE("periodic cross arms reach the cell boundary and connect") {
  const CoefficientField f = periodic_cross(g400, 10, 1.0, 1000.0);
  // arm width 8 fine cells; arms span the whole cell so channels cross cells
  for (int cx = 0; cx < 400; ++cx) CHECK(f.at(cx, 16) == -1000.0);
  for (int cy = 0; cy < 400; ++cy) CHECK(f.at(18, cy) == -1000.0);
  CHECK(f.negative_area_fraction() == doctest::Approx(9.0 / 25.0));
  CHECK(f.contrast() == doctest::Approx(1e-3));
}

TEST_CASE("random inclusions are a pure function of the seed") {
  const CoefficientField a = random_inclusions(g400, 123, 40, {8, 24}, 1.0, 1e-3);
  const CoefficientField b = random_inclusions(g400, 123, 40, {8, 24}, 1.0, 1e-3);
  CHECK(a.values == b.values);
  const CoefficientField c = random_inclusions(g400, 124, 40, {8, 24}, 1.0, 1e-3);
  CHECK(a.values != c.values);
}

TEST_CASE("random inclusions with zero count leave the field positive") {
  const CoefficientField f = random_inclusions(g400, 5, 0, {8, 24}, 2.0, 1.0);
  CHECK_FALSE(f.has_negative);
  CHECK(f.negative_area_fraction() == 0.0);
}

TEST_CASE("canonical random layout stays in the plausible density band") {
  const CoefficientField f = random_inclusions(g400, 1, 60, {8, 24}, 1.0, 1e-3);
  const double fraction = f.negative_area_fraction();
  CHECK(fraction > 0.05);
  CHECK(fraction < 0.35);
}

TEST_CASE("sign partition summary scalars") {
  const CoefficientField f = periodic_square(g400, 10, 3.0, 0.5);
  CHECK(f.has_positive);
  CHECK(f.has_negative);
  CHECK(f.sigma_plus_max == 3.0);
  CHECK(f.sigma_plus_min == 3.0);
  CHECK(f.sigma_minus_max == 0.5);
  CHECK(f.sigma_minus_min == 0.5);
  CHECK(f.contrast() == doctest::Approx(6.0));
  for (double v : f.values) CHECK(v != 0.0);
}

TEST_CASE("gaussian source peak and superposition") {
  const GridHierarchy g = build_hierarchy(40, 10);
  const SourceField single = gaussian_source(g, {{0.5, 0.5}}, 0.01, 2.5);
  CHECK(single.values[g.node_id(20, 20)] == doctest::Approx(2.5));

  const SourceField four = default_gaussian_source(g);
  // equidistant superposition at the center: distance^2 = 0.125 to each bump
  CHECK(four.values[g.node_id(20, 20)] == doctest::Approx(4.0 * std::exp(-0.125 / 0.02)));
}

TEST_CASE("gaussian source symmetry for the four-bump layout") {
  const GridHierarchy g = build_hierarchy(40, 10);
  const SourceField f = default_gaussian_source(g);
  for (int iy = 0; iy <= 40; ++iy)
    for (int ix = 0; ix <= 40; ++ix) {
      CHECK(f.values[g.node_id(ix, iy)] == doctest::Approx(f.values[g.node_id(iy, ix)]));
      CHECK(f.values[g.node_id(ix, iy)] == doctest::Approx(f.values[g.node_id(40 - ix, iy)]));
    }
}
