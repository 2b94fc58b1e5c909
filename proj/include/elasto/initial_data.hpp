#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "elasto/discretization.hpp"
#include "elasto/state.hpp"

namespace elasto {

/// One Fourier mode of the initial displacement: amplitude * sin(k . y), with
/// k in integer units of 2 pi / Lbox.
struct ModeSpec {
  std::array<int, 3> k{0, 0, 0};
  std::array<double, 3> amplitude{0.0, 0.0, 0.0};
};

enum class InitialVelocity {
  /// v0 makes every mode a forward travelling wave of the linearised system
  /// at t = 0 (shear speed 1, pressure speed sqrt(1 + gamma)).
  traveling,
  zero,
};

struct InitialData {
  enum class Kind { modes, random };
  Kind kind = Kind::modes;
  /// Empty means default_modes(dim).
  std::vector<ModeSpec> modes;
  InitialVelocity velocity = InitialVelocity::traveling;
  std::uint64_t seed = 1;
  int band = 2;
};

/// The documented low-mode family (wavenumbers 1-2 per axis).
std::vector<ModeSpec> default_modes(int dim);

/// eta~0 = eps * sum_m amp_m sin(k_m . y) and v0 per the velocity rule, or for
/// Kind::random two independent seeded band-limited fields scaled to max
/// amplitude eps.
DeformationState make_initial_state(const InitialData& data, const SimParams& params,
                                    const GridSpec& grid);

/// Seeded random vector field with modes |k_a| <= band, coefficients damped
/// by 1/(1+|k|^2), normalised to unit max amplitude. Deterministic across
/// platforms (mt19937_64 with explicit bit-to-double conversion).
Field random_band_limited(const GridSpec& grid, std::uint64_t seed, int band);

/// Adds amplitude * sin(k . y) to a vector field.
void add_mode(Field& f, const GridSpec& grid, const ModeSpec& mode, double scale);

}  // namespace elasto
