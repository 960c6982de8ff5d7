#pragma once

// Independent brute-force oracles used only by tests: naive loop versions of
// the quadrature, composition and the cubic energy integral, and the
// composition power series for sh/ch.

#include <random>

#include "pairex/kernel.hpp"

namespace pairex::testing {

inline Complex naive_inner(const Field& a, const Field& b) {
  Complex s = 0.0;
  for (Index j = 0; j < a.values.size(); ++j) s += std::conj(a.values(j)) * b.values(j);
  return a.grid->weight * s;
}

inline CMatrix naive_compose(const Grid& g, const CMatrix& a, const CMatrix& b) {
  const Index n = g.total_points;
  CMatrix out = CMatrix::Zero(n, n);
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y) {
      Complex s = 0.0;
      for (Index z = 0; z < n; ++z) s += a(x, z) * b(z, y);
      out(x, y) = g.weight * s;
    }
  return out;
}

inline CVector naive_kernel_on_field(const Grid& g, const CMatrix& k, const CVector& f) {
  const Index n = g.total_points;
  CVector out = CVector::Zero(n);
  for (Index x = 0; x < n; ++x) {
    Complex s = 0.0;
    for (Index y = 0; y < n; ++y) s += k(x, y) * f(y);
    out(x) = g.weight * s;
  }
  return out;
}

// 12-term composition series for sh and ch
inline std::pair<CMatrix, CMatrix> series_sh_ch(const Grid& g, const CMatrix& kvals,
                                                int terms = 12) {
  const double w = g.weight;
  const CMatrix kw = w * kvals;
  CMatrix sh = kw;
  CMatrix odd = kw;
  CMatrix ch = CMatrix::Identity(kw.rows(), kw.cols());
  CMatrix even = ch;
  for (int m = 1; m <= terms; ++m) {
    even = (even * kw.conjugate() * kw / (2.0 * m - 1.0) / (2.0 * m)).eval();
    ch += even;
    odd = (odd * kw.conjugate() * kw / (2.0 * m) / (2.0 * m + 1.0)).eval();
    sh += odd;
  }
  return {sh / w, ch / w};
}

// (1/2) int v(x1-x2) |phi_1 sh_23 + phi_2 sh_13|^2 dx1 dx2 dx3, naive triple loop
inline double naive_cubic_energy(const Grid& g, const RMatrix& vd, const CVector& phi,
                                 const CMatrix& sh) {
  const Index n = g.total_points;
  double acc = 0.0;
  for (Index x1 = 0; x1 < n; ++x1)
    for (Index x2 = 0; x2 < n; ++x2)
      for (Index x3 = 0; x3 < n; ++x3)
        acc += vd(x1, x2) *
               std::norm(phi(x1) * sh(x2, x3) + phi(x2) * sh(x1, x3));
  return 0.5 * std::pow(g.weight, 3) * acc;
}

inline Kernel random_symmetric(GridPtr grid, std::mt19937_64& rng, double target_norm) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Index n = grid->total_points;
  CMatrix m(n, n);
  for (Index c = 0; c < n; ++c)
    for (Index r = 0; r < n; ++r) m(r, c) = Complex(gauss(rng), gauss(rng));
  m = (0.5 * (m + m.transpose())).eval();
  Kernel k{std::move(m), grid, SymmetryTag::symmetric};
  const double on = operator_norm(k);
  if (on > 0) k.entries *= target_norm / on;
  return k;
}

inline CVector random_field(GridPtr grid, std::mt19937_64& rng, bool normalize = true) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVector f(grid->total_points);
  for (Index j = 0; j < f.size(); ++j) f(j) = Complex(gauss(rng), gauss(rng));
  if (normalize) f /= std::sqrt(grid->weight) * f.norm();
  return f;
}

}  // namespace pairex::testing
