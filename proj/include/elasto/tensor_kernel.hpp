#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <initializer_list>

#include "elasto/errors.hpp"

namespace elasto {

/// Dense d x d matrix for d in {2, 3}, stored row-major in fixed storage.
///
/// Used pointwise for deformation gradients and their cofactors, so it is a
/// plain value type with no heap traffic.
class SmallMatrix {
 public:
  explicit SmallMatrix(int dim) : dim_(dim) { assert(dim == 2 || dim == 3); }

  SmallMatrix(int dim, std::initializer_list<double> row_major) : dim_(dim) {
    assert(dim == 2 || dim == 3);
    assert(static_cast<int>(row_major.size()) == dim * dim);
    std::copy(row_major.begin(), row_major.end(), entries_.begin());
  }

  static SmallMatrix identity(int dim) { return scalar(dim, 1.0); }

  static SmallMatrix scalar(int dim, double c) {
    SmallMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = c;
    return m;
  }

  int dim() const { return dim_; }

  double& operator()(int i, int j) { return entries_[i * dim_ + j]; }
  double operator()(int i, int j) const { return entries_[i * dim_ + j]; }

  /// Max absolute row sum.
  double norm_inf() const {
    double best = 0.0;
    for (int i = 0; i < dim_; ++i) {
      double row = 0.0;
      for (int j = 0; j < dim_; ++j) row += std::abs((*this)(i, j));
      best = std::max(best, row);
    }
    return best;
  }

  double max_abs() const {
    double best = 0.0;
    for (int k = 0; k < dim_ * dim_; ++k) best = std::max(best, std::abs(entries_[k]));
    return best;
  }

  SmallMatrix& operator+=(const SmallMatrix& o) {
    for (int k = 0; k < dim_ * dim_; ++k) entries_[k] += o.entries_[k];
    return *this;
  }
  SmallMatrix& operator-=(const SmallMatrix& o) {
    for (int k = 0; k < dim_ * dim_; ++k) entries_[k] -= o.entries_[k];
    return *this;
  }
  SmallMatrix& operator*=(double c) {
    for (int k = 0; k < dim_ * dim_; ++k) entries_[k] *= c;
    return *this;
  }

  friend SmallMatrix operator+(SmallMatrix a, const SmallMatrix& b) { return a += b; }
  friend SmallMatrix operator-(SmallMatrix a, const SmallMatrix& b) { return a -= b; }
  friend SmallMatrix operator*(SmallMatrix a, double c) { return a *= c; }
  friend SmallMatrix operator*(double c, SmallMatrix a) { return a *= c; }

  friend SmallMatrix operator*(const SmallMatrix& a, const SmallMatrix& b) {
    assert(a.dim_ == b.dim_);
    SmallMatrix r(a.dim_);
    for (int i = 0; i < a.dim_; ++i)
      for (int j = 0; j < a.dim_; ++j) {
        double s = 0.0;
        for (int k = 0; k < a.dim_; ++k) s += a(i, k) * b(k, j);
        r(i, j) = s;
      }
    return r;
  }

  friend bool operator==(const SmallMatrix& a, const SmallMatrix& b) {
    if (a.dim_ != b.dim_) return false;
    for (int k = 0; k < a.dim_ * a.dim_; ++k)
      if (a.entries_[k] != b.entries_[k]) return false;
    return true;
  }

 private:
  int dim_;
  std::array<double, 9> entries_{};
};

inline SmallMatrix transpose(const SmallMatrix& m) {
  SmallMatrix r(m.dim());
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) r(i, j) = m(j, i);
  return r;
}

inline double det(const SmallMatrix& m) {
  if (m.dim() == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

/// Transposed cofactor matrix: m * adjugate(m) == det(m) * I.
inline SmallMatrix adjugate(const SmallMatrix& m) {
  if (m.dim() == 2) return SmallMatrix(2, {m(1, 1), -m(0, 1), -m(1, 0), m(0, 0)});
  SmallMatrix r(3);
  r(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  r(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
  r(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
  r(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
  r(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
  r(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
  r(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
  r(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
  r(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return r;
}

/// Cofactor matrix, i.e. det(m) * m^{-T}. Rows are the divergence-free
/// combinations in the Piola identity.
inline SmallMatrix cofactor(const SmallMatrix& m) { return transpose(adjugate(m)); }

/// Default singularity threshold: 1e-12 * ||m||_inf^d.
inline double default_singular_tol(const SmallMatrix& m) {
  return 1e-12 * std::pow(m.norm_inf(), m.dim());
}

/// m^{-T}; throws SingularMatrix when |det m| <= tol.
inline SmallMatrix inv_transpose(const SmallMatrix& m, double tol) {
  const double dm = det(m);
  if (!(std::abs(dm) > tol)) throw SingularMatrix(dm, tol);
  SmallMatrix r = cofactor(m);
  r *= 1.0 / dm;
  return r;
}

inline SmallMatrix inv_transpose(const SmallMatrix& m) {
  return inv_transpose(m, default_singular_tol(m));
}

}  // namespace elasto
