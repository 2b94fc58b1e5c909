#include "elasto/eulerian.hpp"

#include <algorithm>
#include <cmath>

#include "elasto/affine_frame.hpp"
#include "elasto/errors.hpp"
#include "elasto/parallel.hpp"

namespace elasto {

namespace {

double euclid(const Point& a, int d) {
  double s = 0.0;
  for (int k = 0; k < d; ++k) s += a[k] * a[k];
  return std::sqrt(s);
}

}  // namespace

FlowMap::FlowMap(Field eta_tilde, double t, Differentiator& diff)
    : grid_(diff.grid()), t_(t), eta_(std::move(eta_tilde)), grad_(diff.gradient(eta_)), interp_(grid_) {}

FlowMap FlowMap::from_xi(const Field& xi, double t, Differentiator& diff) {
  const GridSpec& g = diff.grid();
  const Field y = affine::reference_coordinates(g);
  Field eta = xi;
  eta *= 1.0 / (1.0 + t);
  eta -= y;
  return FlowMap(std::move(eta), t, diff);
}

void FlowMap::evaluate_with_jacobian(const Point& y, Point& x, SmallMatrix& jac) const {
  const int d = grid_.dim;
  const auto st = interp_.stencil(y);
  const double s = 1.0 + t_;
  for (int i = 0; i < d; ++i) {
    x[i] = s * (y[i] + interp_.apply(st, eta_.component(i)));
    for (int j = 0; j < d; ++j)
      jac(i, j) = s * ((i == j ? 1.0 : 0.0) + interp_.apply(st, grad_.component(i * d + j)));
  }
}

Point FlowMap::evaluate(const Point& y) const {
  const int d = grid_.dim;
  const auto st = interp_.stencil(y);
  Point x{0.0, 0.0, 0.0};
  for (int i = 0; i < d; ++i) x[i] = (1.0 + t_) * (y[i] + interp_.apply(st, eta_.component(i)));
  return x;
}

SmallMatrix FlowMap::jacobian(const Point& y) const {
  Point x{};
  SmallMatrix jac(grid_.dim);
  evaluate_with_jacobian(y, x, jac);
  return jac;
}

InversionResult invert_flow_map(const FlowMap& map, std::span<const Point> xs,
                                const NewtonSettings& settings) {
  const int d = map.grid().dim;
  const double s = 1.0 + map.t();
  const double tol = settings.tol > 0.0 ? settings.tol : 1e-10 * s * map.grid().length;
  InversionResult out;
  out.y.resize(xs.size());
  out.iterations.resize(xs.size());
  std::vector<double> residuals(xs.size());

  parallel_for(xs.size(), [&](std::size_t q) {
    const Point& x = xs[q];
    Point y{0.0, 0.0, 0.0};
    for (int k = 0; k < d; ++k) y[k] = x[k] / s;
    Point fx{};
    SmallMatrix jac(d);
    map.evaluate_with_jacobian(y, fx, jac);
    Point r{};
    for (int k = 0; k < d; ++k) r[k] = fx[k] - x[k];
    double nr = euclid(r, d);
    int iters = 1;
    while (nr > tol) {
      if (iters >= settings.max_iterations) throw NewtonDiverged(nr, iters);
      // Newton direction jac^{-1} r = (jac^{-T})^T r
      const SmallMatrix inv_t = inv_transpose(jac);
      Point delta{0.0, 0.0, 0.0};
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) delta[i] += inv_t(j, i) * r[j];
      double step = 1.0;
      Point trial{};
      Point ftrial{};
      SmallMatrix jtrial(d);
      Point rtrial{};
      double ntrial = 0.0;
      for (int h = 0; h <= settings.max_halvings; ++h) {
        for (int k = 0; k < d; ++k) trial[k] = y[k] - step * delta[k];
        map.evaluate_with_jacobian(trial, ftrial, jtrial);
        for (int k = 0; k < d; ++k) rtrial[k] = ftrial[k] - x[k];
        ntrial = euclid(rtrial, d);
        if (ntrial < nr) break;
        step *= 0.5;
      }
      y = trial;
      jac = jtrial;
      r = rtrial;
      nr = ntrial;
      ++iters;
    }
    out.y[q] = y;
    out.iterations[q] = iters;
    residuals[q] = nr;
  });

  for (std::size_t q = 0; q < xs.size(); ++q) {
    out.max_iterations = std::max(out.max_iterations, out.iterations[q]);
    out.max_residual = std::max(out.max_residual, residuals[q]);
  }
  return out;
}

GridSpec eulerian_grid(const GridSpec& lagrangian, double t) { return lagrangian.scaled(1.0 + t); }

std::vector<Point> grid_points(const GridSpec& grid) {
  std::vector<Point> pts(grid.points(), Point{0.0, 0.0, 0.0});
  for (std::size_t p = 0; p < pts.size(); ++p)
    for (int a = 0; a < grid.dim; ++a) pts[p][a] = grid.coordinate(p, a);
  return pts;
}

EulerianSnapshot reconstruct(const DeformationState& state, Differentiator& diff,
                             const NewtonSettings& settings) {
  const GridSpec& grid = diff.grid();
  const int d = grid.dim;
  const double s = 1.0 + state.t;
  const FlowMap map(state.eta_tilde, state.t, diff);
  const Field grad_eta = diff.gradient(state.eta_tilde);

  EulerianSnapshot snap;
  snap.query_grid = eulerian_grid(grid, state.t);
  snap.t = state.t;
  const auto xs = grid_points(snap.query_grid);
  auto inv = invert_flow_map(map, xs, settings);

  const std::size_t n = xs.size();
  snap.rho = Field(n, 1);
  snap.u = Field(n, d);
  snap.F = Field(n, d * d);
  const Interpolator& interp = map.interpolator();
  parallel_for(n, [&](std::size_t q) {
    const Point& y = inv.y[q];
    const auto st = interp.stencil(y);
    SmallMatrix F(d);
    for (int i = 0; i < d; ++i) {
      const double eta_i = interp.apply(st, state.eta_tilde.component(i));
      const double v_i = interp.apply(st, state.v.component(i));
      snap.u(i, q) = s * v_i + (y[i] + eta_i);
      for (int j = 0; j < d; ++j) {
        F(i, j) = s * ((i == j ? 1.0 : 0.0) + interp.apply(st, grad_eta.component(i * d + j)));
        snap.F(i * d + j, q) = F(i, j);
      }
    }
    snap.rho(0, q) = 1.0 / det(F);
  });
  snap.preimages = std::move(inv.y);
  snap.max_newton_iterations = inv.max_iterations;
  snap.max_newton_residual = inv.max_residual;
  return snap;
}

namespace {

struct Deviations {
  Field rho;
  Field u;
  Field F;
};

Deviations deviations(const EulerianSnapshot& snap) {
  const GridSpec& g = snap.query_grid;
  const int d = g.dim;
  const double s = 1.0 + snap.t;
  Deviations dv{snap.rho, snap.u, snap.F};
  const double rho_bar = affine::background_density(snap.t, d);
  for (double& x : dv.rho.values()) x -= rho_bar;
  for (std::size_t p = 0; p < g.points(); ++p) {
    for (int a = 0; a < d; ++a) dv.u(a, p) -= g.coordinate(p, a) / s;
    for (int a = 0; a < d; ++a) dv.F(a * d + a, p) -= s;
  }
  return dv;
}

double ratio(double num, double den) { return num == 0.0 ? 0.0 : num / den; }

EulerianRatios ratios_from(const Deviations& dv, const EulerianSnapshot& snap, double eps, int order,
                           Differentiator& qdiff) {
  const int d = snap.query_grid.dim;
  const double s = 1.0 + snap.t;
  EulerianRatios r;
  r.order = order;
  r.norm_rho = std::sqrt(sobolev_pairing_by_order(dv.rho, dv.rho, order, qdiff)[order]);
  r.norm_u = std::sqrt(sobolev_pairing_by_order(dv.u, dv.u, order, qdiff)[order]);
  r.norm_F = std::sqrt(sobolev_pairing_by_order(dv.F, dv.F, order, qdiff)[order]);
  const double rho_bound = eps * std::pow(s, affine::density_decay_exponent(d, order));
  const double uF_bound = eps * std::pow(s, affine::velocity_gradient_exponent(d, order));
  r.r_rho = ratio(r.norm_rho, rho_bound);
  r.r_u = ratio(r.norm_u, uF_bound);
  r.r_F = ratio(r.norm_F, uF_bound);
  r.r_uF = ratio(r.norm_u + r.norm_F, uF_bound);
  return r;
}

}  // namespace

std::vector<EulerianRatios> eulerian_bound_ratios(const EulerianSnapshot& snap, double eps, int max_order) {
  Differentiator qdiff(snap.query_grid);
  const Deviations dv = deviations(snap);
  std::vector<EulerianRatios> out;
  for (int i = 0; i <= max_order; ++i) out.push_back(ratios_from(dv, snap, eps, i, qdiff));
  return out;
}

EulerianRatios eulerian_bound_ratios_at(const EulerianSnapshot& snap, double eps, int order) {
  Differentiator qdiff(snap.query_grid);
  return ratios_from(deviations(snap), snap, eps, order, qdiff);
}

ConstitutionResiduals constitution_residuals(const EulerianSnapshot& snap) {
  const GridSpec& g = snap.query_grid;
  const int d = g.dim;
  const std::size_t n = g.points();
  Differentiator qdiff(g);
  ConstitutionResiduals res;
  res.density_det = Field(n, 1);
  Field rhoF(n, d * d);
  for (std::size_t p = 0; p < n; ++p) {
    SmallMatrix F(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) F(i, j) = snap.F(i * d + j, p);
    const double rho = snap.rho(0, p);
    res.density_det(0, p) = rho * det(F) - 1.0;
    res.field_scale = std::max(res.field_scale, rho * F.norm_inf());
    for (int k = 0; k < d * d; ++k) rhoF(k, p) = rho * snap.F(k, p);
  }

  // d_l (rho F_ji) at component ((j*d + i)*d + l)
  const Field grad_rhoF = qdiff.gradient(rhoF);
  res.divergence = Field(n, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const auto src = grad_rhoF.component((j * d + i) * d + j);
      auto dst = res.divergence.component(i);
      for (std::size_t p = 0; p < n; ++p) dst[p] += src[p];
    }

  // d_l F_ik at component ((i*d + k)*d + l)
  const Field grad_F = qdiff.gradient(snap.F);
  res.compatibility = Field(n, d * d * d);
  for (std::size_t p = 0; p < n; ++p)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i) {
          double acc = 0.0;
          for (int l = 0; l < d; ++l)
            acc += snap.F(l * d + j, p) * grad_F((i * d + k) * d + l, p) -
                   snap.F(l * d + k, p) * grad_F((i * d + j) * d + l, p);
          res.compatibility((j * d + k) * d + i, p) = acc;
        }

  res.max_density_det = res.density_det.max_abs();
  res.max_divergence = res.divergence.max_abs();
  res.max_compatibility = res.compatibility.max_abs();
  return res;
}

}  // namespace elasto
