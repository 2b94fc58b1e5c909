#include "elasto/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "elasto/affine_frame.hpp"
#include "elasto/errors.hpp"
#include "elasto/geometry.hpp"

namespace elasto {

namespace {

double sum_orders(const std::array<double, 5>& by_order, int lo, int hi) {
  double s = 0.0;
  for (int i = lo; i <= hi; ++i) s += by_order[i];
  return s;
}

double pressure_term(const GeometricQuantities& gq, const SimParams& params, double t,
                     Differentiator& diff) {
  const GridSpec& grid = diff.grid();
  const auto parts = mixed_partials(grid.dim, 3);
  std::vector<MultiIndex> list;
  for (const auto& p : parts) list.push_back(p.orders);
  const auto d3q = diff.partials(gq.q.component(0), list);
  double integral = 0.0;
  for (std::size_t p = 0; p < grid.points(); ++p) {
    double sq = 0.0;
    for (std::size_t k = 0; k < parts.size(); ++k) sq += parts[k].multiplicity * d3q[k][p] * d3q[k][p];
    integral += std::pow(gq.J(0, p), params.gamma + 1.0) * sq;
  }
  integral *= grid.cell_volume();
  return affine::pressure_weight(t, grid.dim, params.gamma) / params.gamma * integral;
}

struct Pairings {
  std::array<double, 5> vv;
  std::array<double, 5> ee;
  std::array<double, 5> ve;
};

Pairings pairings(const DeformationState& s, Differentiator& diff) {
  return {sobolev_pairing_by_order(s.v, s.v, 3, diff), sobolev_pairing_by_order(s.eta_tilde, s.eta_tilde, 4, diff),
          sobolev_pairing_by_order(s.v, s.eta_tilde, 3, diff)};
}

EnergyBreakdown assemble(const Pairings& pr, double pressure, double t) {
  EnergyBreakdown e;
  e.t = t;
  e.T1 = sum_orders(pr.vv, 0, 3);
  e.T2 = affine::displacement_weight(t) * sum_orders(pr.ee, 0, 3);
  e.T3 = sum_orders(pr.ee, 1, 4);
  e.T4 = affine::damping_coefficient(t) * sum_orders(pr.ve, 0, 3);
  e.T5 = pressure;
  return e;
}

double safe_ratio(double num, double den) {
  if (num == 0.0) return 0.0;
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return num / den;
}

// Periodic remainders V - y and xi - (1+t) y of the Lagrangian fields.
std::pair<Field, Field> lagrangian_remainders(const DeformationState& s, const GridSpec& grid) {
  auto lf = affine::from_perturbation(s.eta_tilde, s.v, s.t, grid);
  const Field y = affine::reference_coordinates(grid);
  lf.V -= y;
  lf.xi.axpy(-(1.0 + s.t), y);
  return {std::move(lf.V), std::move(lf.xi)};
}

}  // namespace

const std::vector<std::string>& series_columns() {
  static const std::vector<std::string> cols{"t",      "L",          "T1",          "T2",   "T3",   "T4",
                                             "T5",     "wL",         "nv_H3",       "neta_H3",
                                             "ngradeta_H3", "minJ",  "maxJ",        "piola_res",
                                             "r_v",    "r_xi",       "r_gradxi"};
  return cols;
}

double column_value(const NormRecord& r, std::string_view c) {
  if (c == "t") return r.t;
  if (c == "L") return r.energy.total();
  if (c == "T1") return r.energy.T1;
  if (c == "T2") return r.energy.T2;
  if (c == "T3") return r.energy.T3;
  if (c == "T4") return r.energy.T4;
  if (c == "T5") return r.energy.T5;
  if (c == "wL") return r.energy.weighted();
  if (c == "nv_H3") return r.v_H3;
  if (c == "neta_H3") return r.eta_H3;
  if (c == "ngradeta_H3") return r.grad_eta_H3;
  if (c == "minJ") return r.min_J;
  if (c == "maxJ") return r.max_J;
  if (c == "piola_res") return r.piola_res;
  if (c == "r_v") return r.r_v;
  if (c == "r_xi") return r.r_xi;
  if (c == "r_gradxi") return r.r_gradxi;
  throw ValidationError("quantity", "unknown series column '" + std::string(c) + "'");
}

EnergyBreakdown energy_L(const DeformationState& state, const SimParams& params, Differentiator& diff) {
  const auto gq = compute_geometric(state.eta_tilde, params.gamma, diff);
  return assemble(pairings(state, diff), pressure_term(gq, params, state.t, diff), state.t);
}

NormRecord measure(const DeformationState& state, const SimParams& params, double eps1,
                   Differentiator& diff) {
  const auto gq = compute_geometric(state.eta_tilde, params.gamma, diff);
  const Pairings pr = pairings(state, diff);
  NormRecord r;
  r.t = state.t;
  r.energy = assemble(pr, pressure_term(gq, params, state.t, diff), state.t);
  r.v_H3 = std::sqrt(sum_orders(pr.vv, 0, 3));
  r.eta_H3 = std::sqrt(sum_orders(pr.ee, 0, 3));
  r.grad_eta_H3 = std::sqrt(sum_orders(pr.ee, 1, 4));
  r.min_J = gq.min_J;
  r.max_J = gq.max_J;
  r.piola_res = piola_residual(gq, diff).max_abs();
  const auto ratios = lagrangian_bound_ratios(state, eps1, diff);
  r.r_v = ratios.r_v;
  r.r_xi = ratios.r_xi;
  r.r_gradxi = ratios.r_gradxi;
  return r;
}

double weighted_sup(const NormSeries& series) {
  if (series.empty()) throw InsufficientData("weighted_sup of an empty series");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& r : series) best = std::max(best, r.energy.weighted());
  return best;
}

double initial_data_size(const DeformationState& initial, Differentiator& diff) {
  const auto [dv, dxi] = lagrangian_remainders(initial, diff.grid());
  return sobolev_norm(dv, 3, diff) + sobolev_norm(dxi, 4, diff);
}

LagrangianRatios lagrangian_bound_ratios(const DeformationState& state, double eps1,
                                         Differentiator& diff) {
  const auto [dv, dxi] = lagrangian_remainders(state, diff.grid());
  const auto xi_orders = sobolev_pairing_by_order(dxi, dxi, 4, diff);
  LagrangianRatios r;
  r.norm_v = sobolev_norm(dv, 3, diff);
  r.norm_xi = std::sqrt(sum_orders(xi_orders, 0, 3));
  r.norm_gradxi = std::sqrt(sum_orders(xi_orders, 1, 4));
  const double s = 1.0 + state.t;
  r.r_v = safe_ratio(r.norm_v, eps1 * std::pow(s, affine::kLagrangianGrowth[0]));
  r.r_xi = safe_ratio(r.norm_xi, eps1 * std::pow(s, affine::kLagrangianGrowth[1]));
  r.r_gradxi = safe_ratio(r.norm_gradxi, eps1 * std::pow(s, affine::kLagrangianGrowth[2]));
  return r;
}

ExponentFit fit_exponent(std::span<const double> t, std::span<const double> values, double t0,
                         double t1) {
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t0 || t[k] > t1) continue;
    if (!(values[k] > 0.0)) throw InsufficientData("non-positive value at t = " + std::to_string(t[k]));
    xs.push_back(std::log1p(t[k]));
    ys.push_back(std::log(values[k]));
  }
  if (xs.size() < 10)
    throw InsufficientData("need at least 10 records in the fit window, have " + std::to_string(xs.size()));
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  if (sxx == 0.0) throw InsufficientData("fit window has no spread in t");
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double e = ys[k] - (fit.intercept + fit.slope * xs[k]);
    rss += e * e;
  }
  fit.residual = std::sqrt(rss / n);
  fit.count = xs.size();
  return fit;
}

ExponentFit fit_exponent(const NormSeries& series, std::string_view quantity, double t0, double t1) {
  std::vector<double> t, v;
  for (const auto& r : series) {
    t.push_back(r.t);
    v.push_back(column_value(r, quantity));
  }
  return fit_exponent(t, v, t0, t1);
}

ExponentFit fit_exponent(const NormSeries& series, std::string_view quantity) {
  if (series.empty()) throw InsufficientData("empty series");
  const double t0 = series.front().t;
  const double t1 = series.back().t;
  return fit_exponent(series, quantity, 0.5 * (t0 + t1), t1);
}

}  // namespace elasto
