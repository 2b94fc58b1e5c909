#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace elasto {

enum class Backend { spectral, fd2 };

std::string to_string(Backend b);

/// Periodic box [0, length)^dim sampled at n points per axis.
struct GridSpec {
  int dim = 2;
  int n = 64;
  double length = 2.0 * std::numbers::pi;
  Backend backend = Backend::spectral;
  /// Zero modes above 2/3 of Nyquist in every derivative (spectral only).
  bool dealias = false;

  std::size_t points() const;
  double spacing() const { return length / n; }
  double cell_volume() const;
  /// Throws ValidationError on a malformed grid.
  void validate() const;

  /// Flat index layout is row-major with axis 0 slowest.
  std::array<int, 3> index(std::size_t flat) const;
  std::size_t flat(std::array<int, 3> idx) const;
  double coordinate(std::size_t flat, int axis) const { return index(flat)[axis] * spacing(); }

  GridSpec scaled(double factor) const {
    GridSpec g = *this;
    g.length *= factor;
    return g;
  }
  GridSpec refined(int factor) const {
    GridSpec g = *this;
    g.n *= factor;
    return g;
  }
};

/// Grid values of a field with `components` entries per point, stored
/// component-major. Scalars have 1 component, vectors d, tensors d*d with
/// entry (i, j) at component i*d + j.
class Field {
 public:
  Field() = default;
  Field(std::size_t points, int components, double fill = 0.0)
      : points_(points), components_(components), data_(points * components, fill) {}

  static Field scalar(const GridSpec& g, double fill = 0.0) { return Field(g.points(), 1, fill); }
  static Field vector(const GridSpec& g, double fill = 0.0) { return Field(g.points(), g.dim, fill); }
  static Field tensor(const GridSpec& g, double fill = 0.0) {
    return Field(g.points(), g.dim * g.dim, fill);
  }

  std::size_t points() const { return points_; }
  int components() const { return components_; }

  std::span<double> component(int c) { return {data_.data() + c * points_, points_}; }
  std::span<const double> component(int c) const { return {data_.data() + c * points_, points_}; }

  double& operator()(int c, std::size_t p) { return data_[c * points_ + p]; }
  double operator()(int c, std::size_t p) const { return data_[c * points_ + p]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double c);
  /// this += c * o
  Field& axpy(double c, const Field& o);

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double c, Field a) { return a *= c; }

  bool all_finite() const;
  double max_abs() const;
  friend bool operator==(const Field&, const Field&) = default;

 private:
  std::size_t points_ = 0;
  int components_ = 0;
  std::vector<double> data_;
};

/// Derivative orders per axis, e.g. {1, 0, 2} = d/dy0 d^2/dy2.
using MultiIndex = std::array<int, 3>;

struct WeightedPartial {
  MultiIndex orders;
  /// Number of ordered index tuples that collapse onto `orders`.
  int multiplicity;
};

/// All distinct partials of total order `order` in `dim` dimensions with
/// their multinomial multiplicities; sum of squares weighted this way equals
/// the sum over the full tensor of mixed partials.
std::vector<WeightedPartial> mixed_partials(int dim, int order);

/// Spatial differentiation on the periodic grid. Holds FFT plans and scratch
/// buffers, so one instance must not be shared between threads.
class Differentiator {
 public:
  explicit Differentiator(const GridSpec& grid);
  ~Differentiator();
  Differentiator(Differentiator&&) noexcept;
  Differentiator& operator=(Differentiator&&) noexcept;
  Differentiator(const Differentiator&) = delete;
  Differentiator& operator=(const Differentiator&) = delete;

  const GridSpec& grid() const;

  /// d^order f / dy_axis^order, order <= 4.
  std::vector<double> diff(std::span<const double> f, int axis, int order);
  std::vector<double> partial(std::span<const double> f, const MultiIndex& orders);
  /// Several partials of the same scalar; the spectral backend transforms once.
  std::vector<std::vector<double>> partials(std::span<const double> f,
                                            std::span<const MultiIndex> list);

  /// Component (c * d + a) holds d f_c / dy_a.
  Field gradient(const Field& f);
  /// Sum of second derivatives per component.
  Field laplacian(const Field& f);

  /// L2 norm evaluated from Fourier coefficients (spectral backend only).
  double l2_norm_modal(std::span<const double> f);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Per-order discrete pairings sum_{|alpha| = i} mult * <d^alpha f, d^alpha g>
/// (times cell volume), for i = 0..max_order. f and g must have the same
/// number of components.
std::array<double, 5> sobolev_pairing_by_order(const Field& f, const Field& g, int max_order,
                                               Differentiator& diff);

/// (sum_{i <= k} ||grad^i f||_{L2}^2)^{1/2} over the full mixed-partial tensor.
double sobolev_norm(const Field& f, int k, Differentiator& diff);
double sobolev_norm(std::span<const double> f, int k, Differentiator& diff);

/// Grid-space discrete L2 norm.
double l2_norm(std::span<const double> f, const GridSpec& grid);

/// Off-grid evaluation: barycentric trigonometric interpolation for the
/// spectral backend, tensor-product periodic cubic Lagrange for fd2. Both
/// reproduce node values exactly.
class Interpolator {
 public:
  explicit Interpolator(const GridSpec& grid) : grid_(grid) {}

  /// Per-axis node weights for one point (point is wrapped into the box).
  struct Stencil {
    std::array<std::vector<int>, 3> nodes;
    std::array<std::vector<double>, 3> weights;
  };

  Stencil stencil(std::span<const double> point) const;
  double apply(const Stencil& s, std::span<const double> values) const;

  std::vector<double> interpolate(std::span<const double> f,
                                  std::span<const std::array<double, 3>> points) const;

  const GridSpec& grid() const { return grid_; }

 private:
  void axis_weights(double x, std::vector<int>& nodes, std::vector<double>& weights) const;
  GridSpec grid_;
};

}  // namespace elasto
