#include "cemsc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cemsc {

GridHierarchy build_hierarchy(int fine_n, int coarse_n) {
  if (coarse_n < 1 || fine_n < coarse_n)
    throw ConfigError("build_hierarchy: need fine_n >= coarse_n >= 1, got fine_n=" +
                      std::to_string(fine_n) + " coarse_n=" + std::to_string(coarse_n));
  if (fine_n % coarse_n != 0)
    throw ConfigError("build_hierarchy: meshes not nested, fine_n=" + std::to_string(fine_n) +
                      " is not divisible by coarse_n=" + std::to_string(coarse_n));
  GridHierarchy g;
  g.fine_n = fine_n;
  g.coarse_n = coarse_n;
  g.sub_n = fine_n / coarse_n;
  g.h = 1.0 / fine_n;
  g.H = 1.0 / coarse_n;
  g.elem_diam = std::sqrt(2.0) * g.H;
  return g;
}

Region oversample(const GridHierarchy& g, int elem, int m) {
  if (elem < 0 || elem >= g.n_elem())
    throw ConfigError("oversample: element index out of range");
  if (m < 0) throw ConfigError("oversample: negative layer count");
  auto [ex, ey] = g.elem_coords(elem);
  Region r;
  r.ex0 = std::max(0, ex - m);
  r.ey0 = std::max(0, ey - m);
  r.ex1 = std::min(g.coarse_n - 1, ex + m);
  r.ey1 = std::min(g.coarse_n - 1, ey + m);
  r.elements.reserve(static_cast<std::size_t>(r.elem_width()) * r.elem_height());
  for (int y = r.ey0; y <= r.ey1; ++y)
    for (int x = r.ex0; x <= r.ex1; ++x) r.elements.push_back(g.elem_id(x, y));
  r.node_x0 = r.ex0 * g.sub_n;
  r.node_y0 = r.ey0 * g.sub_n;
  r.node_x1 = (r.ex1 + 1) * g.sub_n;
  r.node_y1 = (r.ey1 + 1) * g.sub_n;
  r.interior_nodes.reserve(static_cast<std::size_t>(std::max(0, r.node_x1 - r.node_x0 - 1)) *
                           std::max(0, r.node_y1 - r.node_y0 - 1));
  for (int iy = r.node_y0 + 1; iy < r.node_y1; ++iy)
    for (int ix = r.node_x0 + 1; ix < r.node_x1; ++ix)
      r.interior_nodes.push_back(g.node_id(ix, iy));
  return r;
}

LocalDofMap local_dof_map(const GridHierarchy& g, const Region& r) {
  LocalDofMap d;
  d.nx0 = r.node_x0;
  d.ny0 = r.node_y0;
  d.nx1 = r.node_x1;
  d.ny1 = r.node_y1;
  const int n = d.n_local();
  d.to_global.resize(n);
  d.is_interior.assign(n, 0);
  d.interior_index.assign(n, -1);
  int local = 0;
  for (int iy = d.ny0; iy <= d.ny1; ++iy) {
    for (int ix = d.nx0; ix <= d.nx1; ++ix, ++local) {
      d.to_global[local] = g.node_id(ix, iy);
      const bool on_region_boundary = ix == d.nx0 || ix == d.nx1 || iy == d.ny0 || iy == d.ny1;
      if (!on_region_boundary && !g.is_boundary_node(ix, iy)) d.is_interior[local] = 1;
    }
  }
  for (int l = 0; l < n; ++l) {
    if (d.is_interior[l]) {
      d.interior_index[l] = static_cast<int>(d.interior_locals.size());
      d.interior_locals.push_back(l);
    }
  }
  return d;
}

LocalDofMap element_dof_map(const GridHierarchy& g, int elem) {
  return local_dof_map(g, oversample(g, elem, 0));
}

Region whole_domain(const GridHierarchy& g) {
  Region r;
  r.ex0 = r.ey0 = 0;
  r.ex1 = r.ey1 = g.coarse_n - 1;
  r.elements.resize(g.n_elem());
  for (int i = 0; i < g.n_elem(); ++i) r.elements[i] = i;
  r.node_x0 = r.node_y0 = 0;
  r.node_x1 = r.node_y1 = g.fine_n;
  r.interior_nodes.reserve(static_cast<std::size_t>(g.fine_n - 1) * (g.fine_n - 1));
  for (int iy = 1; iy < g.fine_n; ++iy)
    for (int ix = 1; ix < g.fine_n; ++ix) r.interior_nodes.push_back(g.node_id(ix, iy));
  return r;
}

}  // namespace cemsc
