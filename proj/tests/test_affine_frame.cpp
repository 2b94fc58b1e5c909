#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "elasto/affine_frame.hpp"
#include "elasto/geometry.hpp"

using namespace elasto;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

GridSpec make_grid(int dim, int n) {
  GridSpec g;
  g.dim = dim;
  g.n = n;
  return g;
}

Field random_vector(const GridSpec& g, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  Field f = Field::vector(g);
  for (double& x : f.values()) x = u(rng);
  return f;
}

}  // namespace

TEST(EulerianAffine, ThreeDimensionsAtTimeOne) {
  const double x[3] = {2.0, 0.0, 0.0};
  const auto e = affine::eulerian_affine(x, 1.0, 3);
  EXPECT_EQ(e.rho, 1.0 / 8.0);
  EXPECT_EQ(e.u[0], 1.0);
  EXPECT_EQ(e.u[1], 0.0);
  EXPECT_EQ(e.u[2], 0.0);
  EXPECT_EQ(e.F, SmallMatrix::scalar(3, 2.0));
  EXPECT_EQ(e.rho * det(e.F), 1.0);
}

TEST(EulerianAffine, InitialTimeIsIdentity) {
  const double x[2] = {0.7, -3.1};
  const auto e = affine::eulerian_affine(x, 0.0, 2);
  EXPECT_EQ(e.rho, 1.0);
  EXPECT_EQ(e.u[0], 0.7);
  EXPECT_EQ(e.u[1], -3.1);
  EXPECT_EQ(e.F, SmallMatrix::identity(2));
}

TEST(EulerianAffine, DensityAtTimeThree) {
  const double x[2] = {0.0, 0.0};
  EXPECT_EQ(affine::eulerian_affine(x, 3.0, 2).rho, 1.0 / 16.0);
}

TEST(EulerianAffine, ConstitutionLawHoldsForAllTimes) {
  const double x[3] = {1.0, 2.0, 3.0};
  for (int d : {2, 3})
    for (double t : {0.0, 0.5, 3.0, 17.25, 1000.0}) {
      const auto e = affine::eulerian_affine(x, t, d);
      EXPECT_NEAR(e.rho * det(e.F), 1.0, 4 * kEps) << d << " " << t;
    }
}

TEST(Weights, ExponentsAndCoefficients) {
  EXPECT_EQ(affine::pressure_exponent(2, 1.4), 2 * 0.4 + 2.0);
  EXPECT_EQ(affine::damping_coefficient(1.0), 1.0);
  EXPECT_EQ(affine::displacement_weight(1.0), 0.5);
  EXPECT_DOUBLE_EQ(affine::density_decay_exponent(2, 0), -1.5);
  EXPECT_DOUBLE_EQ(affine::velocity_gradient_exponent(2, 0), 1.5);
  EXPECT_DOUBLE_EQ(affine::density_decay_exponent(3, 2), -4.0);
  EXPECT_DOUBLE_EQ(affine::velocity_gradient_exponent(3, 3), -1.0);
}

TEST(ToPerturbation, AffineMotionIsZeroPerturbation) {
  const auto g = make_grid(2, 16);
  const Field y = affine::reference_coordinates(g);
  for (double t : {0.0, 1.5}) {
    const auto s = affine::to_perturbation((1.0 + t) * y, y, t, g);
    EXPECT_LE(s.eta_tilde.max_abs(), 8 * kEps);
    EXPECT_LE(s.v.max_abs(), 8 * kEps);
  }
}

TEST(ToPerturbation, SingleModeFlowMap) {
  // xi = (1+t)(y + eps sin(y1) e1), V = d xi/dt = y + eps sin(y1) e1
  const auto g = make_grid(2, 16);
  const double eps = 1e-2, t = 0.75;
  const Field y = affine::reference_coordinates(g);
  Field bump = Field::vector(g);
  for (std::size_t p = 0; p < g.points(); ++p) bump(0, p) = eps * std::sin(g.coordinate(p, 0));
  const Field V = y + bump;
  const Field xi = (1.0 + t) * V;
  const auto s = affine::to_perturbation(xi, V, t, g);
  EXPECT_LE((s.eta_tilde - bump).max_abs(), 16 * kEps);
  EXPECT_LE(s.v.max_abs(), 16 * kEps);
}

TEST(FromPerturbation, ZeroPerturbationAtTimeTwo) {
  const auto g = make_grid(3, 4);
  const Field y = affine::reference_coordinates(g);
  const auto lf = affine::from_perturbation(Field::vector(g), Field::vector(g), 2.0, g);
  EXPECT_EQ(lf.xi, 3.0 * y);
  EXPECT_EQ(lf.V, y);
}

TEST(FromPerturbation, SingleModeAtTimeOne) {
  const auto g = make_grid(2, 16);
  Field eta = Field::vector(g);
  for (std::size_t p = 0; p < g.points(); ++p) eta(0, p) = 1e-3 * std::sin(g.coordinate(p, 0));
  const auto lf = affine::from_perturbation(eta, Field::vector(g), 1.0, g);
  const Field expect = 2.0 * (affine::reference_coordinates(g) + eta);
  EXPECT_LE((lf.xi - expect).max_abs(), 4 * kEps);
}

TEST(FromPerturbation, RoundTripsWithToPerturbation) {
  const auto g = make_grid(2, 16);
  const double ymax = g.length;
  for (double t : {0.0, 0.3, 4.0}) {
    const Field eta = random_vector(g, 1, 0.1);
    const Field v = random_vector(g, 2, 0.1);
    const auto lf = affine::from_perturbation(eta, v, t, g);
    const auto back = affine::to_perturbation(lf.xi, lf.V, t, g);
    EXPECT_LE((back.eta_tilde - eta).max_abs(), 4 * kEps * ymax) << t;
    EXPECT_LE((back.v - v).max_abs(), 4 * kEps * ymax) << t;

    const Field xi = random_vector(g, 3, 10.0);
    const Field V = random_vector(g, 4, 10.0);
    const auto st = affine::to_perturbation(xi, V, t, g);
    const auto again = affine::from_perturbation(st.eta_tilde, st.v, t, g);
    EXPECT_LE((again.xi - xi).max_abs(), 4 * kEps * 10.0 * (1.0 + t)) << t;
    EXPECT_LE((again.V - V).max_abs(), 4 * kEps * 10.0 * (1.0 + t)) << t;
  }
}

TEST(ScalingRelations, ZeroDisplacementAtTimeOneIn3d) {
  const auto g = make_grid(3, 4);
  Differentiator d(g);
  const auto gq = compute_geometric(Field::vector(g), 1.4, d);
  const auto sr = affine::scaling_relations(gq, 1.0, 3, 1.4);
  for (std::size_t p = 0; p < g.points(); ++p) {
    EXPECT_EQ(sr.calJ(0, p), 8.0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        EXPECT_EQ(sr.B(i * 3 + j, p), i == j ? 0.5 : 0.0);
        EXPECT_EQ(sr.b(i * 3 + j, p), i == j ? 4.0 : 0.0);
      }
  }
}

TEST(ScalingRelations, InitialTimeIsIdentityMap) {
  const auto g = make_grid(2, 16);
  Differentiator d(g);
  const auto gq = compute_geometric(random_vector(g, 5, 0.001), 1.4, d);
  const auto sr = affine::scaling_relations(gq, 0.0, 2, 1.4);
  EXPECT_EQ(sr.calJ, gq.J);
  EXPECT_EQ(sr.B, gq.A);
  EXPECT_EQ(sr.b, gq.a);
  EXPECT_EQ(sr.p, gq.q);
}

TEST(ScalingRelations, PressureIsPowerOfScaledJacobian) {
  const auto g = make_grid(2, 32);
  Differentiator d(g);
  Field eta = Field::vector(g);
  for (std::size_t p = 0; p < g.points(); ++p) eta(1, p) = 0.05 * std::sin(g.coordinate(p, 0) + g.coordinate(p, 1));
  const double gamma = 1.4;
  const auto gq = compute_geometric(eta, gamma, d);
  const auto sr = affine::scaling_relations(gq, 2.5, 2, gamma);
  for (std::size_t p = 0; p < g.points(); ++p)
    EXPECT_NEAR(sr.p(0, p) / std::pow(sr.calJ(0, p), -gamma), 1.0, 1e-13);
}
