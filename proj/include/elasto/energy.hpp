#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "elasto/discretization.hpp"
#include "elasto/state.hpp"

namespace elasto {

/// The five additive terms of the weighted energy functional at time t:
///   T1 = ||v||_{H3}^2
///   T2 = 2/(1+t)^2 ||eta~||_{H3}^2
///   T3 = ||grad eta~||_{H3}^2
///   T4 = 2/(1+t) sum_{i<=3} <grad^i v, grad^i eta~>
///   T5 = (gamma (1+t)^{d(gamma-1)+2})^{-1} int J^{gamma+1} |grad^3 q|^2
struct EnergyBreakdown {
  double t = 0.0;
  double T1 = 0.0;
  double T2 = 0.0;
  double T3 = 0.0;
  double T4 = 0.0;
  double T5 = 0.0;

  double total() const { return T1 + T2 + T3 + T4 + T5; }
  /// (1+t) L(t)
  double weighted() const { return (1.0 + t) * total(); }
  /// 1/2 T1 + T3 + T5, a lower bound for L.
  double coercive_floor() const { return 0.5 * T1 + T3 + T5; }
};

/// One row of the monitored time series.
struct NormRecord {
  double t = 0.0;
  EnergyBreakdown energy;
  double v_H3 = 0.0;
  double eta_H3 = 0.0;
  double grad_eta_H3 = 0.0;
  double min_J = 1.0;
  double max_J = 1.0;
  double piola_res = 0.0;
  double r_v = 0.0;
  double r_xi = 0.0;
  double r_gradxi = 0.0;
};

using NormSeries = std::vector<NormRecord>;

/// Column names of the series CSV, in order.
const std::vector<std::string>& series_columns();
/// Value of a named column; throws ValidationError for an unknown name.
double column_value(const NormRecord& r, std::string_view column);

EnergyBreakdown energy_L(const DeformationState& state, const SimParams& params, Differentiator& diff);

/// Energy, norms, J range, Piola residual and growth-bound ratios in one
/// pass. eps1 is the initial data size used to normalise the ratios.
NormRecord measure(const DeformationState& state, const SimParams& params, double eps1,
                   Differentiator& diff);

/// max over records of (1+t) L(t). Throws InsufficientData on an empty series.
double weighted_sup(const NormSeries& series);

/// ||V0 - y||_{H3} + ||xi0 - y||_{H4} for a state at t = 0.
double initial_data_size(const DeformationState& initial, Differentiator& diff);

struct LagrangianRatios {
  double r_v = 0.0;       ///< ||V - y||_{H3} / (eps1 (1+t)^{1/2})
  double r_xi = 0.0;      ///< ||xi - (1+t)y||_{H3} / (eps1 (1+t)^{3/2})
  double r_gradxi = 0.0;  ///< ||grad xi - (1+t)I||_{H3} / (eps1 (1+t)^{1/2})
  double norm_v = 0.0;
  double norm_xi = 0.0;
  double norm_gradxi = 0.0;
};

/// Ratios of the Lagrangian deviations (V, xi built with from_perturbation)
/// to their growth bounds.
LagrangianRatios lagrangian_bound_ratios(const DeformationState& state, double eps1,
                                         Differentiator& diff);

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// RMS of the log-log fit residuals.
  double residual = 0.0;
  std::size_t count = 0;
};

/// Least-squares slope of log(value) against log(1+t) over t in [t0, t1].
/// Throws InsufficientData for fewer than 10 points in the window or any
/// non-positive value.
ExponentFit fit_exponent(std::span<const double> t, std::span<const double> values, double t0,
                         double t1);
ExponentFit fit_exponent(const NormSeries& series, std::string_view quantity, double t0, double t1);
/// Default window: the last half of the run.
ExponentFit fit_exponent(const NormSeries& series, std::string_view quantity);

}  // namespace elasto
