#pragma once

#include <utility>
#include <vector>

#include "cemsc/util.hpp"

namespace cemsc {

/// Nested structured quad meshes on the unit square: a fine mesh of
/// fine_n x fine_n cells and a coarse mesh of coarse_n x coarse_n elements,
/// with fine_n divisible by coarse_n so every fine cell sits in exactly one
/// coarse element. Node and cell ids are lexicographic with x running fastest.
struct GridHierarchy {
  int fine_n = 0;
  int coarse_n = 0;
  int sub_n = 0;        // fine cells per coarse element, per side
  double h = 0.0;       // fine cell size
  double H = 0.0;       // coarse element size
  double elem_diam = 0.0;  // sqrt(2) * H

  int n_elem() const { return coarse_n * coarse_n; }
  int nodes_per_side() const { return fine_n + 1; }
  int n_fine_nodes() const { return nodes_per_side() * nodes_per_side(); }
  int n_fine_cells() const { return fine_n * fine_n; }

  int node_id(int ix, int iy) const { return iy * nodes_per_side() + ix; }
  std::pair<int, int> node_coords(int id) const {
    return {id % nodes_per_side(), id / nodes_per_side()};
  }
  double node_x(int ix) const { return ix * h; }
  double node_y(int iy) const { return iy * h; }

  int cell_id(int cx, int cy) const { return cy * fine_n + cx; }
  std::pair<int, int> cell_coords(int id) const { return {id % fine_n, id / fine_n}; }

  int elem_id(int ex, int ey) const { return ey * coarse_n + ex; }
  std::pair<int, int> elem_coords(int id) const { return {id % coarse_n, id / coarse_n}; }

  /// Coarse element owning a fine cell.
  int elem_of_cell(int cx, int cy) const { return elem_id(cx / sub_n, cy / sub_n); }

  bool is_boundary_node(int ix, int iy) const {
    return ix == 0 || iy == 0 || ix == fine_n || iy == fine_n;
  }
};

GridHierarchy build_hierarchy(int fine_n, int coarse_n);

/// An axis-aligned block of coarse elements (an oversampling region clipped to
/// the domain) together with the fine nodes of its discrete H^1_0 space.
struct Region {
  int ex0 = 0, ey0 = 0, ex1 = 0, ey1 = 0;  // inclusive coarse-element box
  std::vector<int> elements;               // sorted coarse element ids
  int node_x0 = 0, node_y0 = 0, node_x1 = 0, node_y1 = 0;  // inclusive fine-node box
  std::vector<int> interior_nodes;  // sorted global fine-node ids strictly inside the box

  int elem_width() const { return ex1 - ex0 + 1; }
  int elem_height() const { return ey1 - ey0 + 1; }
  int n_elements() const { return static_cast<int>(elements.size()); }
  bool contains_elem(int ex, int ey) const {
    return ex >= ex0 && ex <= ex1 && ey >= ey0 && ey <= ey1;
  }
};

/// m-layer oversampling region of coarse element `elem`, clipped to the
/// domain. On a structured mesh the vertex-adjacency closure is the Chebyshev
/// ball, so the block is computed arithmetically.
Region oversample(const GridHierarchy& g, int elem, int m);

/// Bidirectional local<->global node indexing for a region, with the interior
/// (discrete H^1_0) mask. Local ordering is lexicographic by global id.
struct LocalDofMap {
  int nx0 = 0, ny0 = 0, nx1 = 0, ny1 = 0;  // inclusive fine-node box

  std::vector<int> to_global;            // local -> global node id
  std::vector<std::uint8_t> is_interior; // per local node
  std::vector<int> interior_locals;      // local ids of interior nodes, ascending
  std::vector<int> interior_index;       // local -> interior slot, -1 outside

  int width() const { return nx1 - nx0 + 1; }
  int height() const { return ny1 - ny0 + 1; }
  int n_local() const { return width() * height(); }
  int n_interior() const { return static_cast<int>(interior_locals.size()); }

  int local_of(int ix, int iy) const {
    if (ix < nx0 || ix > nx1 || iy < ny0 || iy > ny1) return -1;
    return (iy - ny0) * width() + (ix - nx0);
  }
};

LocalDofMap local_dof_map(const GridHierarchy& g, const Region& r);

/// Dof map of a single coarse element (all (sub_n+1)^2 nodes).
LocalDofMap element_dof_map(const GridHierarchy& g, int elem);

/// The whole domain as a region (interior nodes = nodes off the Dirichlet boundary).
Region whole_domain(const GridHierarchy& g);

}  // namespace cemsc
