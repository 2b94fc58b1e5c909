#include "elasto/affine_frame.hpp"

namespace elasto::affine {

EulerianAffine eulerian_affine(std::span<const double> x, double t, int dim) {
  EulerianAffine e{background_density(t, dim), {0.0, 0.0, 0.0}, SmallMatrix::scalar(dim, 1.0 + t)};
  for (int a = 0; a < dim; ++a) e.u[a] = x[a] / (1.0 + t);
  return e;
}

Field reference_coordinates(const GridSpec& grid) {
  Field y = Field::vector(grid);
  for (std::size_t p = 0; p < grid.points(); ++p)
    for (int a = 0; a < grid.dim; ++a) y(a, p) = grid.coordinate(p, a);
  return y;
}

DeformationState to_perturbation(const Field& xi, const Field& V, double t, const GridSpec& grid) {
  const Field y = reference_coordinates(grid);
  const double s = 1.0 + t;
  DeformationState st{Field::vector(grid), Field::vector(grid), t};
  for (int a = 0; a < grid.dim; ++a)
    for (std::size_t p = 0; p < grid.points(); ++p) {
      st.eta_tilde(a, p) = xi(a, p) / s - y(a, p);
      st.v(a, p) = V(a, p) / s - xi(a, p) / (s * s);
    }
  return st;
}

LagrangianFields from_perturbation(const Field& eta_tilde, const Field& v, double t,
                                   const GridSpec& grid) {
  const Field y = reference_coordinates(grid);
  const double s = 1.0 + t;
  LagrangianFields out{Field::vector(grid), Field::vector(grid)};
  for (int a = 0; a < grid.dim; ++a)
    for (std::size_t p = 0; p < grid.points(); ++p) {
      out.xi(a, p) = s * eta_tilde(a, p) + s * y(a, p);
      out.V(a, p) = s * v(a, p) + (eta_tilde(a, p) + y(a, p));
    }
  return out;
}

ScaledQuantities scaling_relations(const GeometricQuantities& gq, double t, int dim, double gamma) {
  const double s = 1.0 + t;
  ScaledQuantities out{gq.J, gq.A, gq.a, gq.q};
  out.calJ *= std::pow(s, dim);
  out.B *= 1.0 / s;
  out.b *= std::pow(s, dim - 1);
  out.p *= std::pow(s, -dim * gamma);
  return out;
}

}  // namespace elasto::affine
