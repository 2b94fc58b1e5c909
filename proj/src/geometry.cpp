#include "elasto/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "elasto/errors.hpp"
#include "elasto/tensor_kernel.hpp"

namespace elasto {

namespace {

SmallMatrix matrix_at(const Field& t, int d, std::size_t p) {
  SmallMatrix m(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = t(i * d + j, p);
  return m;
}

void store(Field& t, const SmallMatrix& m, std::size_t p) {
  const int d = m.dim();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) t(i * d + j, p) = m(i, j);
}

Field full_gradient(const Field& eta_tilde, Differentiator& diff) {
  const int d = diff.grid().dim;
  Field g = diff.gradient(eta_tilde);
  for (int i = 0; i < d; ++i)
    for (double& x : g.component(i * d + i)) x += 1.0;
  return g;
}

// J and a only, for identities that do not involve the pressure.
void jacobian_and_cofactor(const Field& grad_eta, int d, Field& J, Field& a) {
  const std::size_t n = grad_eta.points();
  J = Field(n, 1);
  a = Field(n, d * d);
  for (std::size_t p = 0; p < n; ++p) {
    const SmallMatrix m = matrix_at(grad_eta, d, p);
    J(0, p) = det(m);
    store(a, cofactor(m), p);
  }
}

}  // namespace

GeometricQuantities geometry_from_gradient(Field grad_eta, int dim, double gamma, double threshold) {
  GeometricQuantities gq;
  gq.dim = dim;
  const std::size_t n = grad_eta.points();
  gq.J = Field(n, 1);
  gq.A = Field(n, dim * dim);
  gq.a = Field(n, dim * dim);
  gq.q = Field(n, 1);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  bool degenerate = false;
  for (std::size_t p = 0; p < n; ++p) {
    const double jp = det(matrix_at(grad_eta, dim, p));
    gq.J(0, p) = jp;
    lo = std::min(lo, jp);
    hi = std::max(hi, jp);
    degenerate = degenerate || !(jp > threshold);
  }
  if (degenerate) {
    for (std::size_t p = 0; p < n; ++p)
      if (!std::isfinite(gq.J(0, p))) throw NonFinite(0.0);
    throw InvertibilityLost(lo, threshold);
  }
  for (std::size_t p = 0; p < n; ++p) {
    const SmallMatrix cof = cofactor(matrix_at(grad_eta, dim, p));
    const double jp = gq.J(0, p);
    store(gq.a, cof, p);
    store(gq.A, cof * (1.0 / jp), p);
    gq.q(0, p) = std::pow(jp, -gamma);
  }
  gq.min_J = lo;
  gq.max_J = hi;
  gq.grad_eta = std::move(grad_eta);
  return gq;
}

GeometricQuantities compute_geometric(const Field& eta_tilde, double gamma, Differentiator& diff,
                                      double threshold) {
  return geometry_from_gradient(full_gradient(eta_tilde, diff), diff.grid().dim, gamma, threshold);
}

Field hessian(const Field& f, Differentiator& diff) {
  const int d = diff.grid().dim;
  Field h(f.points(), f.components() * d * d);
  std::vector<MultiIndex> list;
  std::vector<std::pair<int, int>> slots;
  for (int l = 0; l < d; ++l)
    for (int k = l; k < d; ++k) {
      MultiIndex o{0, 0, 0};
      o[l] += 1;
      o[k] += 1;
      list.push_back(o);
      slots.emplace_back(l, k);
    }
  for (int m = 0; m < f.components(); ++m) {
    const auto parts = diff.partials(f.component(m), list);
    for (std::size_t s = 0; s < list.size(); ++s) {
      const auto [l, k] = slots[s];
      std::copy(parts[s].begin(), parts[s].end(), h.component((m * d + l) * d + k).begin());
      if (l != k) std::copy(parts[s].begin(), parts[s].end(), h.component((m * d + k) * d + l).begin());
    }
  }
  return h;
}

Field piola_residual(const GeometricQuantities& gq, Differentiator& diff) {
  const int d = gq.dim;
  const std::size_t n = gq.a.points();
  Field r(n, d);
  const Field da = diff.gradient(gq.a);  // component (i*d + l)*d + k = d_k a_il
  for (int i = 0; i < d; ++i)
    for (int l = 0; l < d; ++l) {
      const auto src = da.component((i * d + l) * d + l);
      auto dst = r.component(i);
      for (std::size_t p = 0; p < n; ++p) dst[p] += src[p];
    }
  return r;
}

Field gradJ_residual(const GeometricQuantities& gq, const Field& eta_tilde, Differentiator& diff) {
  const int d = gq.dim;
  const std::size_t n = gq.J.points();
  Field r = diff.gradient(gq.J);
  const Field hs = hessian(eta_tilde, diff);
  for (int k = 0; k < d; ++k) {
    auto dst = r.component(k);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const auto aij = gq.a.component(i * d + j);
        const auto hk = hs.component((i * d + j) * d + k);
        for (std::size_t p = 0; p < n; ++p) dst[p] -= aij[p] * hk[p];
      }
  }
  return r;
}

Field gradA_residual(const GeometricQuantities& gq, const Field& eta_tilde, Differentiator& diff) {
  const int d = gq.dim;
  const std::size_t n = gq.A.points();
  Field r = diff.gradient(gq.A);  // component (i*d + j)*d + k = d_k A_ij
  const Field hs = hessian(eta_tilde, diff);
  for (std::size_t p = 0; p < n; ++p) {
    const SmallMatrix A = matrix_at(gq.A, d, p);
    for (int k = 0; k < d; ++k) {
      // dF(m, l) = d_l d_k eta~_m
      SmallMatrix dF(d);
      for (int m = 0; m < d; ++m)
        for (int l = 0; l < d; ++l) dF(m, l) = hs((m * d + l) * d + k, p);
      // d_k A = -A dF^T A
      const SmallMatrix expected = (A * transpose(dF) * A) * -1.0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) r((i * d + j) * d + k, p) -= expected(i, j);
    }
  }
  return r;
}

Field jacobi_residual(const DeformationState& before, const DeformationState& after, double dt,
                      Differentiator& diff) {
  const int d = diff.grid().dim;
  const std::size_t n = before.eta_tilde.points();
  Field J0, a0, J1, a1;
  jacobian_and_cofactor(full_gradient(before.eta_tilde, diff), d, J0, a0);
  jacobian_and_cofactor(full_gradient(after.eta_tilde, diff), d, J1, a1);
  const Field gv0 = diff.gradient(before.v);
  const Field gv1 = diff.gradient(after.v);
  Field r(n, 1);
  for (std::size_t p = 0; p < n; ++p) {
    double rate0 = 0.0;
    double rate1 = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        rate0 += a0(i * d + j, p) * gv0(i * d + j, p);
        rate1 += a1(i * d + j, p) * gv1(i * d + j, p);
      }
    r(0, p) = (J1(0, p) - J0(0, p)) / dt - 0.5 * (rate0 + rate1);
  }
  return r;
}

}  // namespace elasto
