#pragma once

#include "elasto/discretization.hpp"

namespace elasto {

enum class Form { divergence, second_order };

/// Perturbation unknowns about the expanding affine flow xi = (1+t) y.
struct DeformationState {
  Field eta_tilde;  ///< eta - y, vector field
  Field v;          ///< d eta / dt, vector field
  double t = 0.0;
};

struct SimParams {
  double gamma = 1.4;
  int dim = 2;
  double cfl = 0.5;
  double epsilon = 1e-3;
  double t_end = 50.0;
  Form form = Form::divergence;

  /// Throws ValidationError.
  void validate() const;
};

std::string to_string(Form f);

inline DeformationState zero_state(const GridSpec& grid, double t = 0.0) {
  return {Field::vector(grid), Field::vector(grid), t};
}

}  // namespace elasto
