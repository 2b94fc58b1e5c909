#include "elasto/discretization.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <complex>
#include <cstring>
#include <mutex>

#include "elasto/errors.hpp"

namespace elasto {

namespace {

// FFTW planning is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

int factorial(int k) {
  int r = 1;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

}  // namespace

std::string to_string(Backend b) { return b == Backend::spectral ? "spectral" : "fd2"; }

std::size_t GridSpec::points() const { return ipow(static_cast<std::size_t>(n), dim); }

double GridSpec::cell_volume() const { return std::pow(spacing(), dim); }

void GridSpec::validate() const {
  if (dim != 2 && dim != 3) throw ValidationError("d", "dimension must be 2 or 3");
  if (n < 4 || (n & (n - 1)) != 0) throw ValidationError("N", "points per axis must be a power of two >= 4");
  if (!(length > 0.0) || !std::isfinite(length)) throw ValidationError("Lbox", "box length must be positive");
}

std::array<int, 3> GridSpec::index(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = dim - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % n);
    flat /= n;
  }
  return idx;
}

std::size_t GridSpec::flat(std::array<int, 3> idx) const {
  std::size_t f = 0;
  for (int a = 0; a < dim; ++a) f = f * n + static_cast<std::size_t>(idx[a]);
  return f;
}

// ---------------------------------------------------------------------------
// Field

Field& Field::operator+=(const Field& o) {
  assert(o.data_.size() == data_.size());
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  assert(o.data_.size() == data_.size());
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

Field& Field::operator*=(double c) {
  for (double& x : data_) x *= c;
  return *this;
}

Field& Field::axpy(double c, const Field& o) {
  assert(o.data_.size() == data_.size());
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += c * o.data_[k];
  return *this;
}

bool Field::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

double Field::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

std::vector<WeightedPartial> mixed_partials(int dim, int order) {
  std::vector<WeightedPartial> out;
  const int top = factorial(order);
  if (dim == 2) {
    for (int a = order; a >= 0; --a) {
      const int b = order - a;
      out.push_back({{a, b, 0}, top / (factorial(a) * factorial(b))});
    }
  } else {
    for (int a = order; a >= 0; --a)
      for (int b = order - a; b >= 0; --b) {
        const int c = order - a - b;
        out.push_back({{a, b, c}, top / (factorial(a) * factorial(b) * factorial(c))});
      }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Differentiator

struct Differentiator::Impl {
  GridSpec grid;
  std::size_t npts = 0;
  std::size_t nspec = 0;
  double* real_buf = nullptr;
  fftw_complex* spec = nullptr;
  fftw_complex* work = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
  // Signed integer wavenumber of each spectral entry per axis.
  std::array<std::vector<int>, 3> wave;

  explicit Impl(const GridSpec& g) : grid(g), npts(g.points()) {
    if (grid.backend != Backend::spectral) return;
    const int n = grid.n;
    nspec = ipow(n, grid.dim - 1) * static_cast<std::size_t>(n / 2 + 1);
    real_buf = fftw_alloc_real(npts);
    spec = fftw_alloc_complex(nspec);
    work = fftw_alloc_complex(nspec);
    std::array<int, 3> dims{n, n, n};
    {
      std::lock_guard lock(planner_mutex());
      forward = fftw_plan_dft_r2c(grid.dim, dims.data(), real_buf, spec, FFTW_ESTIMATE);
      inverse = fftw_plan_dft_c2r(grid.dim, dims.data(), work, real_buf, FFTW_ESTIMATE);
    }
    for (int a = 0; a < grid.dim; ++a) wave[a].resize(nspec);
    const int half = n / 2 + 1;
    for (std::size_t s = 0; s < nspec; ++s) {
      std::size_t rest = s;
      const int last = static_cast<int>(rest % half);
      rest /= half;
      wave[grid.dim - 1][s] = last;
      for (int a = grid.dim - 2; a >= 0; --a) {
        const int k = static_cast<int>(rest % n);
        rest /= n;
        wave[a][s] = k <= n / 2 ? k : k - n;
      }
    }
  }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (inverse) fftw_destroy_plan(inverse);
    fftw_free(real_buf);
    fftw_free(spec);
    fftw_free(work);
  }

  void transform(std::span<const double> f) {
    std::memcpy(real_buf, f.data(), npts * sizeof(double));
    fftw_execute_dft_r2c(forward, real_buf, spec);
  }

  // Applies the derivative symbol to the cached spectrum and inverts.
  void spectral_partial(const MultiIndex& orders, std::span<double> out) {
    const int n = grid.n;
    const double kappa = 2.0 * std::numbers::pi / grid.length;
    const double inv_count = 1.0 / static_cast<double>(npts);
    int total = 0;
    for (int a = 0; a < grid.dim; ++a) total += orders[a];
    // i^total
    static constexpr std::array<std::complex<double>, 4> ipow4{
        std::complex<double>{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const std::complex<double> phase = ipow4[total % 4];
    for (std::size_t s = 0; s < nspec; ++s) {
      double factor = inv_count;
      for (int a = 0; a < grid.dim; ++a) {
        const int o = orders[a];
        if (o == 0) continue;
        const int k = wave[a][s];
        if ((o % 2 == 1 && std::abs(k) == n / 2) || (grid.dealias && 3 * std::abs(k) > n)) {
          factor = 0.0;
          break;
        }
        const double ik = kappa * k;
        for (int m = 0; m < o; ++m) factor *= ik;
      }
      const std::complex<double> c(spec[s][0], spec[s][1]);
      const std::complex<double> r = c * phase * factor;
      work[s][0] = r.real();
      work[s][1] = r.imag();
    }
    fftw_execute_dft_c2r(inverse, work, real_buf);
    std::memcpy(out.data(), real_buf, npts * sizeof(double));
  }

  // One periodic central-difference operator along one axis.
  void fd_axis(std::span<const double> in, std::span<double> out, int axis, int order) const {
    const int n = grid.n;
    const std::size_t stride = ipow(n, grid.dim - 1 - axis);
    const std::size_t block = stride * n;
    const double h = grid.spacing();
    const auto at = [&](std::size_t base, std::size_t inner, int j) {
      const int w = ((j % n) + n) % n;
      return in[base + static_cast<std::size_t>(w) * stride + inner];
    };
    for (std::size_t base = 0; base < npts; base += block)
      for (std::size_t inner = 0; inner < stride; ++inner)
        for (int j = 0; j < n; ++j) {
          double v = 0.0;
          switch (order) {
            case 1:
              v = (at(base, inner, j + 1) - at(base, inner, j - 1)) / (2.0 * h);
              break;
            case 2:
              // symmetric pairs first so constants cancel exactly
              v = ((at(base, inner, j + 1) + at(base, inner, j - 1)) - 2.0 * at(base, inner, j)) / (h * h);
              break;
            case 3:
              v = ((at(base, inner, j + 2) - at(base, inner, j - 2)) -
                   2.0 * (at(base, inner, j + 1) - at(base, inner, j - 1))) /
                  (2.0 * h * h * h);
              break;
            case 4:
              v = (((at(base, inner, j + 2) + at(base, inner, j - 2)) -
                    4.0 * (at(base, inner, j + 1) + at(base, inner, j - 1))) +
                   6.0 * at(base, inner, j)) /
                  (h * h * h * h);
              break;
            default:
              v = at(base, inner, j);
          }
          out[base + static_cast<std::size_t>(j) * stride + inner] = v;
        }
  }

  void fd_partial(std::span<const double> f, const MultiIndex& orders, std::span<double> out) const {
    std::vector<double> cur(f.begin(), f.end());
    std::vector<double> next(npts);
    for (int a = 0; a < grid.dim; ++a) {
      int remaining = orders[a];
      // Orders above 4 on one axis never occur (total order <= 4).
      if (remaining == 0) continue;
      fd_axis(cur, next, a, remaining);
      cur.swap(next);
    }
    std::copy(cur.begin(), cur.end(), out.begin());
  }
};

Differentiator::Differentiator(const GridSpec& grid)
    : impl_((grid.validate(), std::make_unique<Impl>(grid))) {}
Differentiator::~Differentiator() = default;
Differentiator::Differentiator(Differentiator&&) noexcept = default;
Differentiator& Differentiator::operator=(Differentiator&&) noexcept = default;

const GridSpec& Differentiator::grid() const { return impl_->grid; }

std::vector<double> Differentiator::diff(std::span<const double> f, int axis, int order) {
  assert(order >= 0 && order <= 4);
  MultiIndex o{0, 0, 0};
  o[axis] = order;
  return partial(f, o);
}

std::vector<double> Differentiator::partial(std::span<const double> f, const MultiIndex& orders) {
  const MultiIndex list[1] = {orders};
  return std::move(partials(f, list)[0]);
}

std::vector<std::vector<double>> Differentiator::partials(std::span<const double> f,
                                                          std::span<const MultiIndex> list) {
  Impl& m = *impl_;
  assert(f.size() == m.npts);
  std::vector<std::vector<double>> out(list.size(), std::vector<double>(m.npts));
  bool transformed = false;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const MultiIndex& o = list[k];
    if (o[0] + o[1] + o[2] == 0) {
      std::copy(f.begin(), f.end(), out[k].begin());
      continue;
    }
    if (m.grid.backend == Backend::fd2) {
      m.fd_partial(f, o, out[k]);
      continue;
    }
    if (!transformed) {
      m.transform(f);
      transformed = true;
    }
    m.spectral_partial(o, out[k]);
  }
  return out;
}

Field Differentiator::gradient(const Field& f) {
  const int d = impl_->grid.dim;
  Field g(f.points(), f.components() * d);
  std::vector<MultiIndex> axes;
  for (int a = 0; a < d; ++a) {
    MultiIndex o{0, 0, 0};
    o[a] = 1;
    axes.push_back(o);
  }
  for (int c = 0; c < f.components(); ++c) {
    auto parts = partials(f.component(c), axes);
    for (int a = 0; a < d; ++a) std::copy(parts[a].begin(), parts[a].end(), g.component(c * d + a).begin());
  }
  return g;
}

Field Differentiator::laplacian(const Field& f) {
  const int d = impl_->grid.dim;
  Field out(f.points(), f.components());
  std::vector<MultiIndex> axes;
  for (int a = 0; a < d; ++a) {
    MultiIndex o{0, 0, 0};
    o[a] = 2;
    axes.push_back(o);
  }
  for (int c = 0; c < f.components(); ++c) {
    auto parts = partials(f.component(c), axes);
    auto dst = out.component(c);
    for (int a = 0; a < d; ++a)
      for (std::size_t p = 0; p < dst.size(); ++p) dst[p] += parts[a][p];
  }
  return out;
}

double Differentiator::l2_norm_modal(std::span<const double> f) {
  Impl& m = *impl_;
  if (m.grid.backend != Backend::spectral) throw Error("l2_norm_modal requires the spectral backend");
  m.transform(f);
  const int n = m.grid.n;
  const int last = m.grid.dim - 1;
  double sum = 0.0;
  for (std::size_t s = 0; s < m.nspec; ++s) {
    const int k = m.wave[last][s];
    const double weight = (k == 0 || k == n / 2) ? 1.0 : 2.0;
    sum += weight * (m.spec[s][0] * m.spec[s][0] + m.spec[s][1] * m.spec[s][1]);
  }
  // Parseval: sum_x f^2 = sum_k |F_k|^2 / N^d
  return std::sqrt(sum / static_cast<double>(m.npts) * m.grid.cell_volume());
}

// ---------------------------------------------------------------------------
// norms

std::array<double, 5> sobolev_pairing_by_order(const Field& f, const Field& g, int max_order,
                                               Differentiator& diff) {
  assert(f.components() == g.components());
  assert(max_order >= 0 && max_order <= 4);
  const GridSpec& grid = diff.grid();
  const double vol = grid.cell_volume();
  const bool same = &f == &g;
  std::array<double, 5> out{};
  for (int i = 0; i <= max_order; ++i) {
    const auto parts = mixed_partials(grid.dim, i);
    std::vector<MultiIndex> list;
    for (const auto& p : parts) list.push_back(p.orders);
    for (int c = 0; c < f.components(); ++c) {
      const auto df = diff.partials(f.component(c), list);
      const auto dg = same ? df : diff.partials(g.component(c), list);
      for (std::size_t k = 0; k < parts.size(); ++k) {
        double s = 0.0;
        for (std::size_t p = 0; p < df[k].size(); ++p) s += df[k][p] * dg[k][p];
        out[i] += parts[k].multiplicity * s * vol;
      }
    }
  }
  return out;
}

double sobolev_norm(const Field& f, int k, Differentiator& diff) {
  const auto by_order = sobolev_pairing_by_order(f, f, k, diff);
  double s = 0.0;
  for (int i = 0; i <= k; ++i) s += by_order[i];
  return std::sqrt(s);
}

double sobolev_norm(std::span<const double> f, int k, Differentiator& diff) {
  Field tmp(f.size(), 1);
  std::copy(f.begin(), f.end(), tmp.values().begin());
  return sobolev_norm(tmp, k, diff);
}

double l2_norm(std::span<const double> f, const GridSpec& grid) {
  double s = 0.0;
  for (double x : f) s += x * x;
  return std::sqrt(s * grid.cell_volume());
}

// ---------------------------------------------------------------------------
// Interpolator

void Interpolator::axis_weights(double x, std::vector<int>& nodes, std::vector<double>& weights) const {
  const int n = grid_.n;
  const double L = grid_.length;
  const double h = grid_.spacing();
  x = std::fmod(x, L);
  if (x < 0.0) x += L;
  nodes.clear();
  weights.clear();
  const long nearest = std::lround(x / h);
  if (x - nearest * h == 0.0) {
    nodes.push_back(static_cast<int>(nearest % n));
    weights.push_back(1.0);
    return;
  }
  if (grid_.backend == Backend::spectral) {
    // Barycentric trigonometric interpolation for even n:
    // p(x) = sum_j (-1)^j f_j cot(pi (x - x_j)/L) / sum_j (-1)^j cot(pi (x - x_j)/L)
    double total = 0.0;
    nodes.resize(n);
    weights.resize(n);
    for (int j = 0; j < n; ++j) {
      const double w = (j % 2 == 0 ? 1.0 : -1.0) / std::tan(std::numbers::pi * (x - j * h) / L);
      nodes[j] = j;
      weights[j] = w;
      total += w;
    }
    for (double& w : weights) w /= total;
    return;
  }
  const double s = x / h;
  int j = static_cast<int>(std::floor(s));
  const double u = s - j;
  const double w[4] = {-u * (u - 1.0) * (u - 2.0) / 6.0, (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0,
                       -(u + 1.0) * u * (u - 2.0) / 2.0, (u + 1.0) * u * (u - 1.0) / 6.0};
  for (int m = 0; m < 4; ++m) {
    nodes.push_back((((j - 1 + m) % n) + n) % n);
    weights.push_back(w[m]);
  }
}

Interpolator::Stencil Interpolator::stencil(std::span<const double> point) const {
  Stencil s;
  for (int a = 0; a < grid_.dim; ++a) axis_weights(point[a], s.nodes[a], s.weights[a]);
  return s;
}

double Interpolator::apply(const Stencil& s, std::span<const double> values) const {
  const std::size_t n = static_cast<std::size_t>(grid_.n);
  double total = 0.0;
  if (grid_.dim == 2) {
    for (std::size_t a = 0; a < s.nodes[0].size(); ++a) {
      const std::size_t row = static_cast<std::size_t>(s.nodes[0][a]) * n;
      double inner = 0.0;
      for (std::size_t b = 0; b < s.nodes[1].size(); ++b) inner += s.weights[1][b] * values[row + s.nodes[1][b]];
      total += s.weights[0][a] * inner;
    }
    return total;
  }
  for (std::size_t a = 0; a < s.nodes[0].size(); ++a) {
    double mid = 0.0;
    for (std::size_t b = 0; b < s.nodes[1].size(); ++b) {
      const std::size_t row = (static_cast<std::size_t>(s.nodes[0][a]) * n + s.nodes[1][b]) * n;
      double inner = 0.0;
      for (std::size_t c = 0; c < s.nodes[2].size(); ++c) inner += s.weights[2][c] * values[row + s.nodes[2][c]];
      mid += s.weights[1][b] * inner;
    }
    total += s.weights[0][a] * mid;
  }
  return total;
}

std::vector<double> Interpolator::interpolate(std::span<const double> f,
                                              std::span<const std::array<double, 3>> points) const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(apply(stencil(p), f));
  return out;
}

}  // namespace elasto
