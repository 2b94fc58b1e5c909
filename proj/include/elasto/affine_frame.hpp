#pragma once

#include <array>
#include <cmath>
#include <span>

#include "elasto/discretization.hpp"
#include "elasto/geometry.hpp"
#include "elasto/state.hpp"
#include "elasto/tensor_kernel.hpp"

namespace elasto::affine {

// All (1+t)-power weights used anywhere in the library live here.

/// Coefficient of the velocity damping term, 2/(1+t).
inline double damping_coefficient(double t) { return 2.0 / (1.0 + t); }

/// Weight 2/(1+t)^2 on ||eta~||^2 in the energy functional.
inline double displacement_weight(double t) { return 2.0 / ((1.0 + t) * (1.0 + t)); }

/// d(gamma - 1) + 2
inline double pressure_exponent(int dim, double gamma) { return dim * (gamma - 1.0) + 2.0; }

/// (1+t)^{-(d(gamma-1)+2)}, the weight on the pressure force.
inline double pressure_weight(double t, int dim, double gamma) {
  return std::pow(1.0 + t, -pressure_exponent(dim, gamma));
}

/// (1+t)^{-d}
inline double background_density(double t, int dim) { return std::pow(1.0 + t, -dim); }

/// Growth exponents of the Lagrangian deviation bounds: ||V - y||_{H3},
/// ||xi - (1+t)y||_{H3}, ||grad xi - (1+t)I||_{H3}.
inline constexpr std::array<double, 3> kLagrangianGrowth{0.5, 1.5, 0.5};

/// Exponent of the Eulerian density bound at derivative order i.
inline double density_decay_exponent(int dim, int i) { return -0.5 * dim - 0.5 - i; }
/// Exponent of the Eulerian (u, F) bound at derivative order i.
inline double velocity_gradient_exponent(int dim, int i) { return 0.5 * dim + 0.5 - i; }

struct EulerianAffine {
  double rho;
  std::array<double, 3> u;
  SmallMatrix F;
};

/// rho = (1+t)^{-d}, u = x/(1+t), F = (1+t) I.
EulerianAffine eulerian_affine(std::span<const double> x, double t, int dim);

/// Grid coordinates y as a vector field.
Field reference_coordinates(const GridSpec& grid);

struct LagrangianFields {
  Field xi;
  Field V;
};

/// eta~ = xi/(1+t) - y, v = V/(1+t) - xi/(1+t)^2.
DeformationState to_perturbation(const Field& xi, const Field& V, double t, const GridSpec& grid);

/// xi = (1+t) eta~ + (1+t) y, V = (1+t) v + xi/(1+t) (evaluated as eta~ + y).
LagrangianFields from_perturbation(const Field& eta_tilde, const Field& v, double t,
                                   const GridSpec& grid);

/// Quantities of the unscaled flow map.
struct ScaledQuantities {
  Field calJ;  ///< (1+t)^d J
  Field B;     ///< A/(1+t)
  Field b;     ///< (1+t)^{d-1} a
  Field p;     ///< (1+t)^{-d gamma} q
};

ScaledQuantities scaling_relations(const GeometricQuantities& gq, double t, int dim, double gamma);

}  // namespace elasto::affine
