#pragma once

#include "elasto/discretization.hpp"
#include "elasto/state.hpp"

namespace elasto {

/// Flow-map degeneracy threshold on det(grad eta).
inline constexpr double kInvertibilityThreshold = 0.1;

/// Fields derived pointwise from grad eta = I + grad eta~. Tensor entry (i, j)
/// sits at component i*d + j; grad_eta(i, j) = d eta_i / dy_j.
struct GeometricQuantities {
  int dim = 2;
  Field grad_eta;
  Field J;  ///< det grad eta
  Field A;  ///< (grad eta)^{-T}
  Field a;  ///< J A, the cofactor matrix
  Field q;  ///< J^{-gamma}
  double min_J = 1.0;
  double max_J = 1.0;
};

/// Pointwise J, A, a, q from a given full gradient field. Throws
/// InvertibilityLost when min det <= threshold.
GeometricQuantities geometry_from_gradient(Field grad_eta, int dim, double gamma,
                                           double threshold = kInvertibilityThreshold);

/// grad eta = I + grad eta~ differentiated with the grid backend, then the
/// pointwise quantities.
GeometricQuantities compute_geometric(const Field& eta_tilde, double gamma, Differentiator& diff,
                                      double threshold = kInvertibilityThreshold);

/// Second derivatives of a vector field: component (m*d + l)*d + k holds
/// d^2 f_m / dy_l dy_k.
Field hessian(const Field& f, Differentiator& diff);

/// r_i = d_l a_il. Zero in exact arithmetic.
Field piola_residual(const GeometricQuantities& gq, Differentiator& diff);

/// grad J - a_ij d_j grad eta~_i.
Field gradJ_residual(const GeometricQuantities& gq, const Field& eta_tilde, Differentiator& diff);

/// Component (i*d + j)*d + k holds d_k A_ij + A_il d_l d_k eta~_m A_mj.
Field gradA_residual(const GeometricQuantities& gq, const Field& eta_tilde, Differentiator& diff);

/// (J(after) - J(before))/dt - a_ij d_j v_i averaged over the two states;
/// second order in dt for consecutive integrator states.
Field jacobi_residual(const DeformationState& before, const DeformationState& after, double dt,
                      Differentiator& diff);

}  // namespace elasto
