#include "cemsc/metrics.hpp"

#include <cmath>

#include "cemsc/assembly.hpp"

namespace cemsc {

namespace {

/// Accumulates sum over cells of weight(cell) * v_cell^T M_local v_cell for
/// the 4x4 element matrix without assembling a sparse operator.
template <typename WeightFn>
double quadratic_form(const GridHierarchy& g, const Eigen::Matrix4d& local, WeightFn weight,
                      const Eigen::VectorXd& v, const Eigen::VectorXd& w, int cx0, int cy0,
                      int cx1, int cy1) {
  double acc = 0.0;
  for (int cy = cy0; cy < cy1; ++cy) {
    for (int cx = cx0; cx < cx1; ++cx) {
      const int n00 = g.node_id(cx, cy);
      const int n10 = g.node_id(cx + 1, cy);
      const int n11 = g.node_id(cx + 1, cy + 1);
      const int n01 = g.node_id(cx, cy + 1);
      const Eigen::Vector4d a(v[n00], v[n10], v[n11], v[n01]);
      const Eigen::Vector4d b(w[n00], w[n10], w[n11], w[n01]);
      acc += weight(cx, cy) * a.dot(local * b);
    }
  }
  return acc;
}

void check_size(const GridHierarchy& g, const Eigen::VectorXd& v) {
  if (v.size() != g.n_fine_nodes())
    throw DimensionError("metrics: vector length does not match the fine grid");
}

}  // namespace

double energy_norm(const GridHierarchy& g, const CoefficientField& field,
                   const Eigen::VectorXd& v) {
  check_size(g, v);
  const Eigen::Matrix4d k = local_q1_stiffness(g.h);
  const double q = quadratic_form(
      g, k, [&](int cx, int cy) { return std::abs(field.at(cx, cy)); }, v, v, 0, 0, g.fine_n,
      g.fine_n);
  return std::sqrt(std::max(0.0, q));
}

double energy_norm(const GridHierarchy& g, const CoefficientField& field,
                   const Eigen::VectorXd& v, const Region& r) {
  check_size(g, v);
  const Eigen::Matrix4d k = local_q1_stiffness(g.h);
  const double q = quadratic_form(
      g, k, [&](int cx, int cy) { return std::abs(field.at(cx, cy)); }, v, v, r.node_x0,
      r.node_y0, r.node_x1, r.node_y1);
  return std::sqrt(std::max(0.0, q));
}

double l2_norm(const GridHierarchy& g, const Eigen::VectorXd& v) {
  check_size(g, v);
  const Eigen::Matrix4d m = local_q1_mass(g.h);
  const double q = quadratic_form(
      g, m, [](int, int) { return 1.0; }, v, v, 0, 0, g.fine_n, g.fine_n);
  return std::sqrt(std::max(0.0, q));
}

double s_norm(const GridHierarchy& g, const CoefficientField& field, const Eigen::VectorXd& v,
              const Region& r) {
  check_size(g, v);
  const Eigen::Matrix4d m = local_q1_mass(g.h);
  const double mu_scale = 24.0 * g.coarse_n * g.coarse_n;
  const double q = quadratic_form(
      g, m, [&](int cx, int cy) { return mu_scale * std::abs(field.at(cx, cy)); }, v, v,
      r.node_x0, r.node_y0, r.node_x1, r.node_y1);
  return std::sqrt(std::max(0.0, q));
}

double energy_inner(const GridHierarchy& g, const CoefficientField& field,
                    const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
  check_size(g, v);
  check_size(g, w);
  const Eigen::Matrix4d k = local_q1_stiffness(g.h);
  return quadratic_form(
      g, k, [&](int cx, int cy) { return std::abs(field.at(cx, cy)); }, v, w, 0, 0, g.fine_n,
      g.fine_n);
}

ErrorReport error_report(const GridHierarchy& g, const CoefficientField& field,
                         const Eigen::VectorXd& u_ref, const Eigen::VectorXd& u_num) {
  ErrorReport r;
  r.ref_energy = energy_norm(g, field, u_ref);
  r.ref_l2 = l2_norm(g, u_ref);
  if (!(r.ref_energy > 0.0) || !(r.ref_l2 > 0.0))
    throw NumericalError("error_report: reference norm vanishes, relative error undefined");
  const Eigen::VectorXd e = u_ref - u_num;
  r.err_energy = energy_norm(g, field, e);
  r.err_l2 = l2_norm(g, e);
  r.rel_energy = r.err_energy / r.ref_energy;
  r.rel_l2 = r.err_l2 / r.ref_l2;
  if (!std::isfinite(r.rel_energy) || !std::isfinite(r.rel_l2))
    throw NumericalError("error_report: non-finite relative error");
  return r;
}

}  // namespace cemsc
