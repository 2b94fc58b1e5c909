#pragma once

#include <array>
#include <span>
#include <vector>

#include "elasto/discretization.hpp"
#include "elasto/state.hpp"
#include "elasto/tensor_kernel.hpp"

namespace elasto {

using Point = std::array<double, 3>;

/// xi(y) = (1+t)(y + eta~(y)) with eta~ periodic, evaluated off-grid through
/// the grid interpolant. y is not wrapped: xi(y + L e_a) = xi(y) + (1+t) L e_a.
class FlowMap {
 public:
  FlowMap(Field eta_tilde, double t, Differentiator& diff);
  /// Builds the map from grid samples of xi itself.
  static FlowMap from_xi(const Field& xi, double t, Differentiator& diff);

  Point evaluate(const Point& y) const;
  SmallMatrix jacobian(const Point& y) const;
  /// Both at once, sharing the interpolation stencil.
  void evaluate_with_jacobian(const Point& y, Point& x, SmallMatrix& jac) const;

  double t() const { return t_; }
  const GridSpec& grid() const { return grid_; }
  const Field& eta_tilde() const { return eta_; }
  const Interpolator& interpolator() const { return interp_; }

 private:
  GridSpec grid_;
  double t_;
  Field eta_;
  Field grad_;
  Interpolator interp_;
};

struct NewtonSettings {
  /// Residual tolerance; <= 0 selects 1e-10 (1+t) Lbox.
  double tol = 0.0;
  int max_iterations = 50;
  int max_halvings = 5;
};

struct InversionResult {
  std::vector<Point> y;
  std::vector<int> iterations;
  int max_iterations = 0;
  double max_residual = 0.0;
};

/// Damped Newton solve of xi(y) = x for each query point, starting from
/// x/(1+t). Iterations count residual evaluations, so an exact initial guess
/// reports 1. Throws NewtonDiverged when the iteration cap is hit.
InversionResult invert_flow_map(const FlowMap& map, std::span<const Point> x,
                                const NewtonSettings& settings = {});

/// Uniform grid on the image box [0, (1+t) Lbox)^d with the same N.
GridSpec eulerian_grid(const GridSpec& lagrangian, double t);
std::vector<Point> grid_points(const GridSpec& grid);

struct EulerianSnapshot {
  GridSpec query_grid;
  double t = 0.0;
  Field rho;  ///< scalar
  Field u;    ///< vector
  Field F;    ///< tensor, (i, j) at i*d + j
  std::vector<Point> preimages;
  int max_newton_iterations = 0;
  double max_newton_residual = 0.0;
};

/// Eulerian (rho, u, F) on the image grid: u = V(y), F = grad xi(y),
/// rho = 1/det F(y) at y = xi^{-1}(x).
EulerianSnapshot reconstruct(const DeformationState& state, Differentiator& diff,
                             const NewtonSettings& settings = {});

struct EulerianRatios {
  int order = 0;
  double norm_rho = 0.0;  ///< ||grad_x^i (rho - (1+t)^{-d})||_{L2}
  double norm_u = 0.0;    ///< ||grad_x^i (u - x/(1+t))||_{L2}
  double norm_F = 0.0;    ///< ||grad_x^i (F - (1+t) I)||_{L2}
  double r_rho = 0.0;     ///< norm_rho / (eps (1+t)^{-d/2-1/2-i})
  double r_u = 0.0;
  double r_F = 0.0;
  double r_uF = 0.0;  ///< (norm_u + norm_F) / (eps (1+t)^{d/2+1/2-i})
};

/// Ratios of the Eulerian deviations to their decay/growth bounds for
/// derivative orders 0..max_order (max_order <= 3).
std::vector<EulerianRatios> eulerian_bound_ratios(const EulerianSnapshot& snap, double eps,
                                                  int max_order = 3);
EulerianRatios eulerian_bound_ratios_at(const EulerianSnapshot& snap, double eps, int order);

struct ConstitutionResiduals {
  Field density_det;    ///< rho det F - 1
  Field divergence;     ///< (div_x (rho F^T))_i = d_j (rho F_ji)
  Field compatibility;  ///< component (j*d + k)*d + i: F_lj d_l F_ik - F_lk d_l F_ij
  double max_density_det = 0.0;
  double max_divergence = 0.0;
  double max_compatibility = 0.0;
  /// max over the grid of rho ||F||_inf
  double field_scale = 0.0;
};

ConstitutionResiduals constitution_residuals(const EulerianSnapshot& snap);

}  // namespace elasto
