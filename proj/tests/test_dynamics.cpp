#include <gtest/gtest.h>

#include <cmath>

#include "elasto/dynamics.hpp"
#include "elasto/errors.hpp"
#include "elasto/geometry.hpp"
#include "elasto/initial_data.hpp"

using namespace elasto;

namespace {

GridSpec make_grid(int dim, int n, Backend b = Backend::spectral) {
  GridSpec g;
  g.dim = dim;
  g.n = n;
  g.backend = b;
  return g;
}

DeformationState constant_velocity(const GridSpec& g, std::array<double, 3> c, double t = 0.0) {
  DeformationState s = zero_state(g, t);
  for (int a = 0; a < g.dim; ++a)
    for (std::size_t p = 0; p < g.points(); ++p) s.v(a, p) = c[a];
  return s;
}

double rel_l2(const Field& a, const Field& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.values().size(); ++k) {
    num += (a.values()[k] - b.values()[k]) * (a.values()[k] - b.values()[k]);
    den += b.values()[k] * b.values()[k];
  }
  return std::sqrt(num / den);
}

Field random_small_displacement(const GridSpec& g, double grad_max) {
  Differentiator d(g);
  Field f = random_band_limited(g, 21, 2);
  f *= grad_max / d.gradient(f).max_abs();
  return f;
}

// Independent RK4 for v' = -2 v/(1+t), the only surviving term for
// gradient-free data.
double scalar_rk4_damped(double v0, double dt, int steps) {
  const auto f = [](double t, double v) { return -2.0 * v / (1.0 + t); };
  double v = v0, t = 0.0;
  for (int k = 0; k < steps; ++k) {
    const double k1 = f(t, v);
    const double k2 = f(t + dt / 2, v + dt / 2 * k1);
    const double k3 = f(t + dt / 2, v + dt / 2 * k2);
    const double k4 = f(t + dt, v + dt * k3);
    v += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t += dt;
  }
  return v;
}

}  // namespace

TEST(Rhs, ZeroStateIsEquilibrium) {
  const auto g = make_grid(2, 32);
  Differentiator d(g);
  SimParams params;
  for (Form f : {Form::divergence, Form::second_order}) {
    params.form = f;
    const auto r = rhs(zero_state(g, 0.7), params, d);
    EXPECT_EQ(r.d_eta.max_abs(), 0.0);
    EXPECT_EQ(r.d_v.max_abs(), 0.0);
  }
}

TEST(Rhs, ConstantVelocityOnlyFeelsDamping) {
  const auto g = make_grid(2, 16);
  Differentiator d(g);
  SimParams params;
  const auto s = constant_velocity(g, {0.3, -0.2, 0.0}, 1.5);
  for (Form f : {Form::divergence, Form::second_order}) {
    params.form = f;
    const auto r = rhs(s, params, d);
    EXPECT_EQ(r.d_eta, s.v);
    for (std::size_t p = 0; p < g.points(); ++p) {
      EXPECT_DOUBLE_EQ(r.d_v(0, p), -2 * 0.3 / 2.5);
      EXPECT_DOUBLE_EQ(r.d_v(1, p), 2 * 0.2 / 2.5);
    }
  }
}

TEST(Rhs, FormsAgreeOnSingleMode) {
  const auto g = make_grid(2, 64);
  Differentiator d(g);
  SimParams params;
  DeformationState s = zero_state(g);
  for (std::size_t p = 0; p < g.points(); ++p) s.eta_tilde(0, p) = 1e-3 * std::sin(g.coordinate(p, 0));
  const auto a = rhs_divergence(s, params, d);
  const auto b = rhs_second_order(s, params, d);
  EXPECT_LE(rel_l2(a.d_v, b.d_v), 1e-8);
}

TEST(Rhs, FormsAgreeOnRandomBandLimitedData) {
  for (int dim : {2, 3}) {
    const auto g = make_grid(dim, dim == 2 ? 64 : 32);
    Differentiator d(g);
    SimParams params;
    params.dim = dim;
    DeformationState s{random_small_displacement(g, 0.05), 0.01 * random_band_limited(g, 5, 2), 0.4};
    const auto a = rhs_divergence(s, params, d);
    const auto b = rhs_second_order(s, params, d);
    EXPECT_LE(rel_l2(a.d_v, b.d_v), 1e-8) << dim;
  }
}

TEST(Rhs, Fd2FormDifferenceConvergesAtOrderTwo) {
  const auto diff_at = [](int n) {
    const auto g = make_grid(2, n, Backend::fd2);
    Differentiator d(g);
    SimParams params;
    DeformationState s{random_small_displacement(g, 0.05), Field::vector(g), 0.0};
    const auto a = rhs_divergence(s, params, d);
    const auto b = rhs_second_order(s, params, d);
    return rel_l2(a.d_v, b.d_v);
  };
  const double r = diff_at(64) / diff_at(128);
  EXPECT_GE(r, 3.4);
  EXPECT_LE(r, 4.6);
}

TEST(CflDt, HandEvaluationAtRest) {
  const auto g = make_grid(2, 64);
  Differentiator d(g);
  SimParams params;
  const double h = g.spacing();
  EXPECT_NEAR(cfl_dt(zero_state(g), params, d), 0.5 * h / std::sqrt(2.4), 1e-15);
}

TEST(CflDt, ApproachesShearLimitForLateTimes) {
  const auto g = make_grid(2, 32);
  Differentiator d(g);
  SimParams params;
  const double h = g.spacing();
  EXPECT_NEAR(cfl_dt(zero_state(g, 1e6), params, d), 0.5 * h, 1e-9 * h);
}

TEST(CflDt, ShrinksAsCofactorGrows) {
  const auto g = make_grid(2, 32);
  Differentiator d(g);
  SimParams params;
  DeformationState s = zero_state(g);
  double prev = cfl_dt(s, params, d);
  for (double amp : {0.05, 0.1, 0.2}) {
    for (std::size_t p = 0; p < g.points(); ++p) s.eta_tilde(1, p) = amp * std::sin(g.coordinate(p, 0));
    const double dt = cfl_dt(s, params, d);
    EXPECT_LT(dt, prev);
    prev = dt;
  }
}

TEST(StepRk4, ZeroStateStaysZero) {
  const auto g = make_grid(2, 32);
  Differentiator d(g);
  SimParams params;
  const auto s = step_rk4(zero_state(g), 0.37, params, d);
  EXPECT_EQ(s.eta_tilde.max_abs(), 0.0);
  EXPECT_EQ(s.v.max_abs(), 0.0);
  EXPECT_DOUBLE_EQ(s.t, 0.37);
}

TEST(StepRk4, DampedModeOneStepIsFifthOrderLocal) {
  const auto g = make_grid(2, 16);
  Differentiator d(g);
  SimParams params;
  const double c = 0.7;
  double prev = 0.0;
  for (double dt : {0.1, 0.05, 0.025}) {
    const auto s = step_rk4(constant_velocity(g, {c, 0.0, 0.0}), dt, params, d);
    const double exact = c / ((1 + dt) * (1 + dt));
    const double err = std::abs(s.v(0, 0) - exact);
    // constant fields stay spatially constant
    EXPECT_EQ(s.v(0, 0), s.v(0, g.points() - 1));
    if (prev > 0.0) EXPECT_NEAR(std::log2(prev / err), 5.0, 0.3);
    prev = err;
  }
}

TEST(StepRk4, MatchesScalarIntegrator) {
  const auto g = make_grid(3, 8);
  Differentiator d(g);
  SimParams params;
  params.dim = 3;
  DeformationState s = constant_velocity(g, {0.1, 0.2, -0.3});
  for (int k = 0; k < 20; ++k) s = step_rk4(s, 0.05, params, d);
  EXPECT_NEAR(s.v(2, 5), scalar_rk4_damped(-0.3, 0.05, 20), 1e-15);
}

TEST(StepRk4, StampsInvertibilityLossWithStepTime) {
  const auto g = make_grid(2, 32);
  Differentiator d(g);
  SimParams params;
  DeformationState s = zero_state(g, 2.0);
  for (std::size_t p = 0; p < g.points(); ++p) s.eta_tilde(0, p) = 0.95 * std::sin(g.coordinate(p, 0));
  try {
    step_rk4(s, 0.01, params, d);
    FAIL() << "expected InvertibilityLost";
  } catch (const InvertibilityLost& e) {
    EXPECT_EQ(e.time(), 2.0);
  }
}

TEST(StepRk4, NonFiniteInputIsReported) {
  const auto g = make_grid(2, 16);
  Differentiator d(g);
  SimParams params;
  DeformationState s = zero_state(g, 1.0);
  s.v(0, 3) = std::numeric_limits<double>::infinity();
  try {
    step_rk4(s, 0.01, params, d);
    FAIL() << "expected NonFinite";
  } catch (const NonFinite& e) {
    EXPECT_EQ(e.time(), 1.0);
  }
}

TEST(Run, ZeroAmplitudeGivesZeroTrajectory) {
  const auto g = make_grid(2, 32);
  Differentiator d(g);
  SimParams params;
  params.epsilon = 0.0;
  params.t_end = 3.0;
  const auto init = make_initial_state({}, params, g);
  const auto res = run(init, params, d);
  EXPECT_EQ(res.status, RunStatus::completed);
  EXPECT_EQ(res.final_state.eta_tilde.max_abs(), 0.0);
  for (const auto& r : res.series) EXPECT_EQ(r.energy.total(), 0.0);
  EXPECT_EQ(res.series.back().t, 3.0);
}

TEST(Run, IsDeterministic) {
  const auto g = make_grid(2, 32);
  SimParams params;
  params.t_end = 1.0;
  InitialData data;
  data.kind = InitialData::Kind::random;
  data.seed = 77;
  const auto once = [&] {
    Differentiator d(g);
    return run(make_initial_state(data, params, g), params, d, {.output_every = 3});
  };
  const auto a = once();
  const auto b = once();
  ASSERT_EQ(a.series.size(), b.series.size());
  for (std::size_t k = 0; k < a.series.size(); ++k)
    for (const auto& c : series_columns()) EXPECT_EQ(column_value(a.series[k], c), column_value(b.series[k], c));
  EXPECT_EQ(a.final_state.eta_tilde, b.final_state.eta_tilde);
}

TEST(Run, LandsOnStopTimesAndRecordsThem) {
  const auto g = make_grid(2, 16);
  Differentiator d(g);
  SimParams params;
  params.t_end = 2.0;
  std::vector<double> seen;
  RunOptions opts;
  opts.output_every = 1000;
  opts.stop_times = {0.5, 1.25, 7.0};
  opts.on_stop = [&](const DeformationState& s) { seen.push_back(s.t); };
  const auto res = run(make_initial_state({}, params, g), params, d, opts);
  ASSERT_EQ(seen.size(), 2u);
  EXPECT_EQ(seen[0], 0.5);
  EXPECT_EQ(seen[1], 1.25);
  ASSERT_EQ(res.series.size(), 4u);
  EXPECT_EQ(res.series[1].t, 0.5);
  EXPECT_EQ(res.series[3].t, 2.0);
  for (std::size_t k = 1; k < res.series.size(); ++k) EXPECT_GT(res.series[k].t, res.series[k - 1].t);
}

TEST(Run, ReportsInvertibilityLossCleanly) {
  const auto g = make_grid(2, 16);
  Differentiator d(g);
  SimParams params;
  params.t_end = 5.0;
  DeformationState s = zero_state(g);
  // strong compression towards det = 0.1
  for (std::size_t p = 0; p < g.points(); ++p) s.v(0, p) = -5.0 * std::sin(g.coordinate(p, 0));
  const auto res = run(s, params, d);
  EXPECT_EQ(res.status, RunStatus::invertibility_lost);
  EXPECT_GT(res.failure_time, 0.0);
  EXPECT_LT(res.failure_time, 5.0);
  EXPECT_FALSE(res.series.empty());
  EXPECT_FALSE(res.message.empty());
}

TEST(SimParams, Validation) {
  SimParams p;
  p.gamma = 1.0;
  EXPECT_THROW(p.validate(), ValidationError);
  p = SimParams{};
  p.epsilon = -1e-3;
  EXPECT_THROW(p.validate(), ValidationError);
  p = SimParams{};
  p.cfl = 1.5;
  EXPECT_THROW(p.validate(), ValidationError);
  EXPECT_NO_THROW(SimParams{}.validate());
}
