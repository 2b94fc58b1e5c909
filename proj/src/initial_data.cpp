#include "elasto/initial_data.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace elasto {

namespace {

double unit_uniform(std::mt19937_64& rng) {
  // 53 random bits -> [0, 1)
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double phase_at(const GridSpec& grid, const std::array<int, 3>& k, std::size_t p) {
  const double kappa = 2.0 * std::numbers::pi / grid.length;
  double s = 0.0;
  for (int a = 0; a < grid.dim; ++a) s += kappa * k[a] * grid.coordinate(p, a);
  return s;
}

}  // namespace

std::vector<ModeSpec> default_modes(int dim) {
  if (dim == 2) {
    return {
        {{1, 0, 0}, {1.0, 0.0, 0.0}},
        {{0, 1, 0}, {0.6, 0.0, 0.0}},
        {{1, 1, 0}, {0.5, -0.3, 0.0}},
        {{2, 1, 0}, {-0.3, 0.4, 0.0}},
        {{1, 2, 0}, {0.2, 0.35, 0.0}},
    };
  }
  return {
      {{1, 0, 0}, {1.0, 0.0, 0.0}},
      {{0, 1, 0}, {0.6, 0.0, 0.3}},
      {{0, 0, 1}, {0.0, 0.5, 0.4}},
      {{1, 1, 0}, {0.5, -0.3, 0.2}},
      {{0, 1, 2}, {0.3, -0.2, 0.4}},
      {{2, 0, 1}, {-0.3, 0.4, 0.2}},
  };
}

void add_mode(Field& f, const GridSpec& grid, const ModeSpec& mode, double scale) {
  for (std::size_t p = 0; p < grid.points(); ++p) {
    const double s = std::sin(phase_at(grid, mode.k, p));
    for (int a = 0; a < grid.dim; ++a) f(a, p) += scale * mode.amplitude[a] * s;
  }
}

Field random_band_limited(const GridSpec& grid, std::uint64_t seed, int band) {
  std::mt19937_64 rng(seed);
  const int d = grid.dim;
  Field f = Field::vector(grid);
  std::vector<std::array<int, 3>> waves;
  for (int k0 = -band; k0 <= band; ++k0)
    for (int k1 = -band; k1 <= band; ++k1)
      for (int k2 = (d == 3 ? -band : 0); k2 <= (d == 3 ? band : 0); ++k2) {
        const std::array<int, 3> k{k0, k1, k2};
        // one representative of each +-k pair
        const bool positive = k0 > 0 || (k0 == 0 && (k1 > 0 || (k1 == 0 && k2 > 0)));
        if (positive) waves.push_back(k);
      }
  for (int c = 0; c < d; ++c)
    for (const auto& k : waves) {
      const double ca = 2.0 * unit_uniform(rng) - 1.0;
      const double sa = 2.0 * unit_uniform(rng) - 1.0;
      const double k2 = static_cast<double>(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
      const double damp = 1.0 / (1.0 + k2);
      for (std::size_t p = 0; p < grid.points(); ++p) {
        const double ph = phase_at(grid, k, p);
        f(c, p) += damp * (ca * std::cos(ph) + sa * std::sin(ph));
      }
    }
  const double m = f.max_abs();
  if (m > 0.0) f *= 1.0 / m;
  return f;
}

DeformationState make_initial_state(const InitialData& data, const SimParams& params,
                                    const GridSpec& grid) {
  DeformationState st = zero_state(grid);
  const double eps = params.epsilon;
  if (eps == 0.0) return st;

  if (data.kind == InitialData::Kind::random) {
    st.eta_tilde = eps * random_band_limited(grid, data.seed, data.band);
    if (data.velocity != InitialVelocity::zero)
      st.v = eps * random_band_limited(grid, data.seed + 0x9e3779b97f4a7c15ULL, data.band);
    return st;
  }

  const auto modes = data.modes.empty() ? default_modes(grid.dim) : data.modes;
  const double kappa = 2.0 * std::numbers::pi / grid.length;
  const double pressure_speed = std::sqrt(1.0 + params.gamma);
  for (const auto& mode : modes) {
    add_mode(st.eta_tilde, grid, mode, eps);
    if (data.velocity == InitialVelocity::zero) continue;
    // w = (1+t) eta~ solves the undamped wave system; pick w'(0) for a
    // forward travelling wave and set v0 = w'(0) - eta~0.
    double knorm2 = 0.0;
    double along = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
      knorm2 += static_cast<double>(mode.k[a]) * mode.k[a];
      along += mode.k[a] * mode.amplitude[a];
    }
    const double knorm = std::sqrt(knorm2);
    std::array<double, 3> rate{0.0, 0.0, 0.0};
    for (int a = 0; a < grid.dim; ++a) {
      const double longitudinal = along * mode.k[a] / knorm2;
      const double transverse = mode.amplitude[a] - longitudinal;
      rate[a] = -kappa * knorm * (pressure_speed * longitudinal + transverse);
    }
    for (std::size_t p = 0; p < grid.points(); ++p) {
      const double ph = phase_at(grid, mode.k, p);
      const double c = std::cos(ph);
      const double s = std::sin(ph);
      for (int a = 0; a < grid.dim; ++a) st.v(a, p) += eps * (rate[a] * c - mode.amplitude[a] * s);
    }
  }
  return st;
}

}  // namespace elasto
