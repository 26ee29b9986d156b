#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "cemsc/grid.hpp"

using namespace cemsc;

TEST_CASE("build_hierarchy basic quantities") {
  const GridHierarchy g = build_hierarchy(400, 10);
  CHECK(g.sub_n == 40);
  CHECK(g.n_elem() == 100);
  CHECK(g.H == doctest::Approx(0.1));
  CHECK(g.h == doctest::Approx(1.0 / 400));
  CHECK(g.elem_diam == doctest::Approx(0.1 * std::sqrt(2.0)));
  CHECK(g.n_fine_nodes() == 401 * 401);
}

TEST_CASE("build_hierarchy coarse equal to fine") {
  const GridHierarchy g = build_hierarchy(4, 4);
  CHECK(g.sub_n == 1);
  CHECK(g.n_elem() == 16);
}

TEST_CASE("build_hierarchy rejects non-nested pair") {
  CHECK_THROWS_AS(build_hierarchy(10, 3), ConfigError);
  CHECK_THROWS_AS(build_hierarchy(4, 8), ConfigError);
}

TEST_CASE("coarse element owns its block of fine cells") {
  const GridHierarchy g = build_hierarchy(8, 2);
  for (int cy = 0; cy < 4; ++cy)
    for (int cx = 0; cx < 4; ++cx) CHECK(g.elem_of_cell(cx, cy) == g.elem_id(0, 0));
  CHECK(g.elem_of_cell(4, 0) == g.elem_id(1, 0));
  CHECK(g.elem_of_cell(3, 4) == g.elem_id(0, 1));
}

TEST_CASE("every fine cell belongs to exactly one coarse element") {
  const GridHierarchy g = build_hierarchy(12, 3);
  std::vector<int> counts(g.n_elem(), 0);
  for (int cy = 0; cy < g.fine_n; ++cy)
    for (int cx = 0; cx < g.fine_n; ++cx) counts[g.elem_of_cell(cx, cy)]++;
  for (int c : counts) CHECK(c == g.sub_n * g.sub_n);
}

TEST_CASE("oversample interior element is a Chebyshev block") {
  const GridHierarchy g = build_hierarchy(40, 10);
  const Region r = oversample(g, g.elem_id(5, 5), 2);
  CHECK(r.n_elements() == 25);
  CHECK(r.ex0 == 3);
  CHECK(r.ex1 == 7);
  CHECK(r.ey0 == 3);
  CHECK(r.ey1 == 7);
}

TEST_CASE("oversample clips at the domain boundary") {
  const GridHierarchy g = build_hierarchy(40, 10);
  const Region r = oversample(g, g.elem_id(0, 0), 2);
  CHECK(r.n_elements() == 9);
  CHECK(r.ex0 == 0);
  CHECK(r.ex1 == 2);
}

TEST_CASE("oversample saturates at the whole mesh") {
  const GridHierarchy g = build_hierarchy(20, 5);
  for (int elem : {0, 7, 24}) {
    const Region r = oversample(g, elem, g.coarse_n);
    CHECK(r.n_elements() == g.n_elem());
    const Region r2 = oversample(g, elem, g.coarse_n + 3);
    CHECK(r2.elements == r.elements);
    CHECK(r2.interior_nodes == r.interior_nodes);
  }
}

TEST_CASE("oversample m=0 is the element itself") {
  const GridHierarchy g = build_hierarchy(20, 5);
  const Region r = oversample(g, g.elem_id(2, 3), 0);
  CHECK(r.n_elements() == 1);
  CHECK(r.elements[0] == g.elem_id(2, 3));
}

TEST_CASE("oversample regions nest monotonically") {
  const GridHierarchy g = build_hierarchy(30, 6);
  for (int elem : {0, 13, 35}) {
    for (int m = 0; m < 6; ++m) {
      const Region a = oversample(g, elem, m);
      const Region b = oversample(g, elem, m + 1);
      CHECK(std::includes(b.elements.begin(), b.elements.end(), a.elements.begin(),
                          a.elements.end()));
      CHECK(std::includes(b.interior_nodes.begin(), b.interior_nodes.end(),
                          a.interior_nodes.begin(), a.interior_nodes.end()));
    }
  }
}

TEST_CASE("oversample center element of an odd grid is dihedral-symmetric") {
  const GridHierarchy g = build_hierarchy(25, 5);
  const Region r = oversample(g, g.elem_id(2, 2), 1);
  // the block must be centered: equal margins on all sides
  CHECK(r.ex0 == 1);
  CHECK(r.ex1 == 3);
  CHECK(r.ey0 == 1);
  CHECK(r.ey1 == 3);
  // reflect the element set through the center; it must map to itself
  std::set<int> elems(r.elements.begin(), r.elements.end());
  for (int e : elems) {
    auto [ex, ey] = g.elem_coords(e);
    CHECK(elems.count(g.elem_id(4 - ex, ey)));
    CHECK(elems.count(g.elem_id(ex, 4 - ey)));
    CHECK(elems.count(g.elem_id(ey, ex)));
  }
}

TEST_CASE("local_dof_map over the whole domain excludes the boundary nodes") {
  const GridHierarchy g = build_hierarchy(8, 2);
  const LocalDofMap d = local_dof_map(g, whole_domain(g));
  CHECK(d.n_local() == 81);
  CHECK(d.n_interior() == 49);
  CHECK(d.n_local() - d.n_interior() == 4 * g.fine_n);
}

TEST_CASE("local_dof_map of one coarse element") {
  const GridHierarchy g = build_hierarchy(8, 2);
  const LocalDofMap d = element_dof_map(g, 0);
  CHECK(d.n_local() == 25);
  // interior of the element-as-region: strictly inside the 5x5 node block
  CHECK(d.n_interior() == 9);
}

TEST_CASE("local_dof_map round trip is the identity") {
  const GridHierarchy g = build_hierarchy(12, 4);
  const Region r = oversample(g, g.elem_id(1, 2), 1);
  const LocalDofMap d = local_dof_map(g, r);
  for (int l = 0; l < d.n_local(); ++l) {
    auto [ix, iy] = g.node_coords(d.to_global[l]);
    CHECK(d.local_of(ix, iy) == l);
  }
  // ordering is lexicographic by global id
  CHECK(std::is_sorted(d.to_global.begin(), d.to_global.end()));
}

TEST_CASE("region touching the domain boundary excludes its boundary nodes") {
  const GridHierarchy g = build_hierarchy(12, 4);
  const Region r = oversample(g, 0, 1);  // corner element, region touches two sides
  const LocalDofMap d = local_dof_map(g, r);
  for (int l : d.interior_locals) {
    auto [ix, iy] = g.node_coords(d.to_global[l]);
    CHECK(!g.is_boundary_node(ix, iy));
    CHECK(ix > r.node_x0);
    CHECK(ix < r.node_x1);
    CHECK(iy > r.node_y0);
    CHECK(iy < r.node_y1);
  }
  // region interior node list and dof map agree
  std::vector<int> from_map;
  for (int l : d.interior_locals) from_map.push_back(d.to_global[l]);
  CHECK(from_map == r.interior_nodes);
}
