#include "elasto/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "elasto/affine_frame.hpp"
#include "elasto/errors.hpp"
#include "elasto/geometry.hpp"
#include "elasto/tensor_kernel.hpp"

namespace elasto {

std::string to_string(Form f) { return f == Form::divergence ? "divergence" : "second_order"; }

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed:
      return "completed";
    case RunStatus::invertibility_lost:
      return "invertibility_lost";
    case RunStatus::nonfinite:
      return "nonfinite";
  }
  return "unknown";
}

void SimParams::validate() const {
  if (!(gamma > 1.0) || !std::isfinite(gamma)) throw ValidationError("gamma", "gamma > 1 required");
  if (dim != 2 && dim != 3) throw ValidationError("d", "dimension must be 2 or 3");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ValidationError("cfl", "cfl must lie in (0, 1]");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ValidationError("epsilon", "epsilon >= 0 required");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ValidationError("tEnd", "tEnd >= 0 required");
}

namespace {

// dv_i = -2 v_i/(1+t) + lap eta~_i, shared by both forms.
Field damped_elastic_part(const DeformationState& s, Differentiator& diff) {
  Field dv = diff.laplacian(s.eta_tilde);
  dv.axpy(-affine::damping_coefficient(s.t), s.v);
  return dv;
}

}  // namespace

Rhs rhs_divergence(const DeformationState& state, const SimParams& params, Differentiator& diff) {
  const int d = diff.grid().dim;
  const auto gq = compute_geometric(state.eta_tilde, params.gamma, diff);
  const Field grad_q = diff.gradient(gq.q);
  Field dv = damped_elastic_part(state, diff);
  const double w = affine::pressure_weight(state.t, d, params.gamma);
  const std::size_t n = dv.points();
  for (int i = 0; i < d; ++i) {
    auto dst = dv.component(i);
    for (int l = 0; l < d; ++l) {
      const auto ail = gq.a.component(i * d + l);
      const auto dq = grad_q.component(l);
      for (std::size_t p = 0; p < n; ++p) dst[p] -= w * ail[p] * dq[p];
    }
  }
  return {state.v, std::move(dv)};
}

Rhs rhs_second_order(const DeformationState& state, const SimParams& params, Differentiator& diff) {
  const int d = diff.grid().dim;
  const auto gq = compute_geometric(state.eta_tilde, params.gamma, diff);
  const Field hs = hessian(state.eta_tilde, diff);
  Field dv = damped_elastic_part(state, diff);
  const double w = params.gamma * affine::pressure_weight(state.t, d, params.gamma);
  const std::size_t n = dv.points();
  for (std::size_t p = 0; p < n; ++p) {
    const double coeff = w * std::pow(gq.J(0, p), -(params.gamma + 1.0));
    for (int i = 0; i < d; ++i) {
      double acc = 0.0;
      for (int l = 0; l < d; ++l)
        for (int j = 0; j < d; ++j)
          for (int s = 0; s < d; ++s)
            acc += gq.a(i * d + l, p) * gq.a(j * d + s, p) * hs((j * d + s) * d + l, p);
      dv(i, p) += coeff * acc;
    }
  }
  return {state.v, std::move(dv)};
}

Rhs rhs(const DeformationState& state, const SimParams& params, Differentiator& diff) {
  return params.form == Form::divergence ? rhs_divergence(state, params, diff)
                                         : rhs_second_order(state, params, diff);
}

double cfl_dt(const DeformationState& state, const SimParams& params, Differentiator& diff) {
  const int d = diff.grid().dim;
  const auto gq = compute_geometric(state.eta_tilde, params.gamma, diff);
  double worst = 0.0;
  for (std::size_t p = 0; p < gq.J.points(); ++p) {
    SmallMatrix a(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = gq.a(i * d + j, p);
    const double na = a.norm_inf();
    worst = std::max(worst, std::pow(gq.J(0, p), -(params.gamma + 1.0)) * na * na);
  }
  const double lambda = 1.0 + params.gamma * affine::pressure_weight(state.t, d, params.gamma) * worst;
  return params.cfl * diff.grid().spacing() / std::sqrt(lambda);
}

DeformationState step_rk4(const DeformationState& state, double dt, const SimParams& params,
                          Differentiator& diff) {
  const auto stage = [&](const DeformationState& base, const Rhs& k, double h, double t) {
    DeformationState s{base.eta_tilde, base.v, t};
    s.eta_tilde.axpy(h, k.d_eta);
    s.v.axpy(h, k.d_v);
    return s;
  };
  try {
    const double t = state.t;
    const Rhs k1 = rhs(state, params, diff);
    const Rhs k2 = rhs(stage(state, k1, 0.5 * dt, t + 0.5 * dt), params, diff);
    const Rhs k3 = rhs(stage(state, k2, 0.5 * dt, t + 0.5 * dt), params, diff);
    const Rhs k4 = rhs(stage(state, k3, dt, t + dt), params, diff);
    DeformationState next{state.eta_tilde, state.v, t + dt};
    const double w1 = dt / 6.0;
    const double w2 = dt / 3.0;
    next.eta_tilde.axpy(w1, k1.d_eta).axpy(w2, k2.d_eta).axpy(w2, k3.d_eta).axpy(w1, k4.d_eta);
    next.v.axpy(w1, k1.d_v).axpy(w2, k2.d_v).axpy(w2, k3.d_v).axpy(w1, k4.d_v);
    if (!next.eta_tilde.all_finite() || !next.v.all_finite()) throw NonFinite(state.t);
    return next;
  } catch (const InvertibilityLost& e) {
    throw e.at(state.t);
  } catch (const NonFinite&) {
    throw NonFinite(state.t);
  }
}

RunResult run(const DeformationState& initial, const SimParams& params, Differentiator& diff,
              const RunOptions& options) {
  params.validate();
  RunResult result;
  result.eps1 = initial_data_size(initial, diff);
  std::vector<double> stops;
  for (double s : options.stop_times)
    if (s > initial.t && s <= params.t_end) stops.push_back(s);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
  std::size_t next_stop = 0;

  DeformationState state = initial;
  long step = 0;
  const int every = std::max(1, options.output_every);
  // Relative slack for landing exactly on a target time.
  const auto snap = [](double t, double dt, double target) { return t + dt * (1.0 + 1e-9) >= target; };

  try {
    if (options.on_step) options.on_step(state, 0);
    result.series.push_back(measure(state, params, result.eps1, diff));
    while (state.t < params.t_end) {
      double dt = options.fixed_dt > 0.0 ? options.fixed_dt : cfl_dt(state, params, diff);
      const double target = next_stop < stops.size() ? stops[next_stop] : params.t_end;
      bool at_target = false;
      if (snap(state.t, dt, target)) {
        dt = target - state.t;
        at_target = true;
      }
      state = step_rk4(state, dt, params, diff);
      ++step;
      bool at_stop = false;
      if (at_target) {
        state.t = target;
        if (next_stop < stops.size()) {
          ++next_stop;
          at_stop = true;
        }
      }
      if (options.on_step) options.on_step(state, step);
      if (at_stop && options.on_stop) options.on_stop(state);
      if (step % every == 0 || at_stop || state.t >= params.t_end)
        result.series.push_back(measure(state, params, result.eps1, diff));
    }
  } catch (const InvertibilityLost& e) {
    result.status = RunStatus::invertibility_lost;
    result.failure_time = e.time();
    result.message = e.what();
  } catch (const NonFinite& e) {
    result.status = RunStatus::nonfinite;
    result.failure_time = e.time();
    result.message = e.what();
  }
  result.steps = step;
  result.final_state = std::move(state);
  return result;
}

}  // namespace elasto
