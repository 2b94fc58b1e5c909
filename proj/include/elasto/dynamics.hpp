#pragma once

#include <functional>
#include <string>
#include <vector>

#include "elasto/discretization.hpp"
#include "elasto/energy.hpp"
#include "elasto/state.hpp"

namespace elasto {

struct Rhs {
  Field d_eta;
  Field d_v;
};

/// d eta~/dt = v,
/// dv_i/dt = -2 v_i/(1+t) - (1+t)^{-(d(gamma-1)+2)} a_il d_l q + lap eta~_i.
Rhs rhs_divergence(const DeformationState& state, const SimParams& params, Differentiator& diff);

/// Same system with the pressure force expanded by the chain rule:
/// -a_il d_l q = gamma J^{-(gamma+1)} a_il a_js d_s d_l eta~_j.
Rhs rhs_second_order(const DeformationState& state, const SimParams& params, Differentiator& diff);

/// Dispatches on params.form.
Rhs rhs(const DeformationState& state, const SimParams& params, Differentiator& diff);

/// cfl * h / c_max with c_max^2 = 1 + gamma (1+t)^{-(d(gamma-1)+2)} max(J^{-(gamma+1)} ||a||_inf^2).
double cfl_dt(const DeformationState& state, const SimParams& params, Differentiator& diff);

/// Classical four-stage Runge-Kutta step with time-dependent coefficients
/// evaluated at each stage time. Throws InvertibilityLost or NonFinite
/// stamped with the step's start time.
DeformationState step_rk4(const DeformationState& state, double dt, const SimParams& params,
                          Differentiator& diff);

enum class RunStatus { completed, invertibility_lost, nonfinite };

std::string to_string(RunStatus s);

struct RunOptions {
  /// Record every this many steps (and always at the start and end).
  int output_every = 10;
  /// Nonzero overrides the CFL step.
  double fixed_dt = 0.0;
  /// Extra times the integrator lands on exactly; each is recorded.
  std::vector<double> stop_times;
  /// Called with every accepted state (including the initial one).
  std::function<void(const DeformationState&, long step)> on_step;
  /// Called at each stop time.
  std::function<void(const DeformationState&)> on_stop;
};

struct RunResult {
  NormSeries series;
  DeformationState final_state;
  RunStatus status = RunStatus::completed;
  double failure_time = 0.0;
  std::string message;
  long steps = 0;
  /// Initial data size used to normalise growth-bound ratios.
  double eps1 = 0.0;
};

/// Integrates from `initial` to params.t_end. Integration errors end the
/// run cleanly; the result carries the status and the series recorded so far.
RunResult run(const DeformationState& initial, const SimParams& params, Differentiator& diff,
              const RunOptions& options = {});

}  // namespace elasto
