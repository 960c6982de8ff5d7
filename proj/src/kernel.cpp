#include "pairex/kernel.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace pairex {

namespace {

CMatrix weighted(const Kernel& a) { return a.grid->weight * a.entries; }

// ---- scalar function tables for the Takagi functional calculus ----------

// f(lam) = (1 - lam)^(-1/2); exact cancellation-free divided difference
double fc_div(double a, double b) {
  const double ca = std::sqrt(1.0 - a), cb = std::sqrt(1.0 - b);
  return 1.0 / (ca * cb * (ca + cb));
}

// g(lam) = artanh(sqrt(lam)) / sqrt(lam)
double gk_value(double lam) {
  if (lam < 1e-4) {
    double p = lam;
    double s = 1.0 + p / 3.0;
    p *= lam;
    s += p / 5.0;
    p *= lam;
    s += p / 7.0;
    p *= lam;
    s += p / 9.0;
    return s;
  }
  const double r = std::sqrt(lam);
  return std::atanh(r) / r;
}

double gk_prime(double lam) {
  if (lam < 1e-4) {
    return 1.0 / 3.0 + 2.0 * lam / 5.0 + 3.0 * lam * lam / 7.0 +
           4.0 * lam * lam * lam / 9.0;
  }
  return (1.0 / (1.0 - lam) - gk_value(lam)) / (2.0 * lam);
}

double gk_div(double a, double b) {
  const double m = std::max(a, b);
  if (m < 0.09) {
    // g[a,b] = sum_{j>=0} p_j(a,b) / (2j+3),  p_j = sum_{i<=j} a^i b^(j-i)
    double pj = 1.0, bj = 1.0, s = 0.0;
    for (int j = 0;; ++j) {
      const double term = pj / (2.0 * j + 3.0);
      s += term;
      if (term < 1e-19) break;
      bj *= b;
      pj = a * pj + bj;
      if (j > 60) break;
    }
    return s;
  }
  if (std::abs(a - b) <= 1e-8 * m) return gk_prime(0.5 * (a + b));
  if (std::min(a, b) < 1e-12)
    return (gk_value(a) - gk_value(b)) / (a - b);
  const double s = std::sqrt(a), r = std::sqrt(b), d = s - r;
  const double num = r * std::atanh(d / (1.0 - s * r)) - d * std::atanh(r);
  return num / (s * r * d * (s + r));
}

RMatrix divided_difference_table(const RVector& lam, double (*div)(double, double)) {
  const Index n = lam.size();
  RMatrix t(n, n);
  for (Index i = 0; i < n; ++i) {
    t(i, i) = div(lam(i), lam(i));
    for (Index j = 0; j < i; ++j) {
      const double d = div(lam(i), lam(j));
      t(i, j) = d;
      t(j, i) = d;
    }
  }
  return t;
}

// Takagi of the weighted matrix Z (complex symmetric): Z = U sigma U^T.
// Eigenbasis of the Hermitian Z conj(Z) groups exactly-degenerate singular
// values; within a degenerate block Z acts as sigma * (unitary symmetric),
// factorized through the commuting real/imaginary parts.
struct TakagiResult {
  CMatrix u;
  RVector sigma;
};

TakagiResult takagi_weighted(const CMatrix& zin, double block_rel_tol) {
  const Index n = zin.rows();
  CMatrix z = 0.5 * (zin + zin.transpose());
  const double scale = z.norm();
  TakagiResult out;
  if (scale < 1e-300) {
    out.u = CMatrix::Identity(n, n);
    out.sigma = RVector::Zero(n);
    return out;
  }

  CMatrix h = z * z.conjugate();
  h = (0.5 * (h + h.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("takagi: eigensolver failed");

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  const RVector& lam = es.eigenvalues();
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return lam(a) > lam(b); });

  CMatrix q(n, n);
  RVector sig0(n);
  for (Index j = 0; j < n; ++j) {
    q.col(j) = es.eigenvectors().col(order[j]);
    sig0(j) = std::sqrt(std::max(0.0, lam(order[j])));
  }

  const double block_tol = block_rel_tol * sig0(0);
  CMatrix u = q;
  Index p = 0;
  while (p < n) {
    Index e = p + 1;
    while (e < n && sig0(e - 1) - sig0(e) <= block_tol) ++e;
    const Index m = e - p;
    if (m > 1) {
      CMatrix c = q.middleCols(p, m).adjoint() * z * q.middleCols(p, m).conjugate();
      c = (0.5 * (c + c.transpose())).eval();
      const double sbar = sig0.segment(p, m).mean();
      if (sbar > 1e-13 * scale) {
        // c ~ sbar * (unitary symmetric); real and imaginary parts commute
        RMatrix x = (c.real() / sbar);
        x = (0.5 * (x + x.transpose())).eval();
        RMatrix y = (c.imag() / sbar);
        y = (0.5 * (y + y.transpose())).eval();
        Eigen::SelfAdjointEigenSolver<RMatrix> ex(x);
        RMatrix rot = ex.eigenvectors();
        const RVector dx = ex.eigenvalues();
        Index cp = 0;
        while (cp < m) {
          Index ce = cp + 1;
          while (ce < m && dx(ce) - dx(cp) <= 1e-7) ++ce;
          if (ce - cp > 1) {
            RMatrix yc = rot.middleCols(cp, ce - cp).transpose() * y *
                         rot.middleCols(cp, ce - cp);
            yc = (0.5 * (yc + yc.transpose())).eval();
            Eigen::SelfAdjointEigenSolver<RMatrix> ey(yc);
            rot.middleCols(cp, ce - cp) =
                (rot.middleCols(cp, ce - cp) * ey.eigenvectors()).eval();
          }
          cp = ce;
        }
        u.middleCols(p, m) = q.middleCols(p, m) * rot;
      }
    }
    p = e;
  }

  // diagonal phase polish: (U^H Z conj(U))_jj = sigma_j after absorbing phases
  CMatrix dm = u.adjoint() * z * u.conjugate();
  RVector sigma(n);
  for (Index j = 0; j < n; ++j) {
    const Complex d = dm(j, j);
    const double s = std::abs(d);
    if (s > 1e-14 * scale) u.col(j) *= std::polar(1.0, 0.5 * std::arg(d));
    sigma(j) = s;
  }

  std::vector<Index> perm(n);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::stable_sort(perm.begin(), perm.end(),
                   [&](Index a, Index b) { return sigma(a) > sigma(b); });
  CMatrix usort(n, n);
  RVector ssort(n);
  for (Index j = 0; j < n; ++j) {
    usort.col(j) = u.col(perm[j]);
    ssort(j) = sigma(perm[j]);
  }
  out.u = std::move(usort);
  out.sigma = std::move(ssort);
  return out;
}

CMatrix assemble_odd(const TakagiFactorization& tk, const RVector& fvals) {
  return tk.u * fvals.asDiagonal() * tk.u.transpose();
}

CMatrix assemble_even(const TakagiFactorization& tk, const RVector& fvals) {
  return tk.u.conjugate() * fvals.asDiagonal() * tk.u.transpose();
}

}  // namespace

Kernel make_kernel(GridPtr grid, CMatrix entries, SymmetryTag tag) {
  if (entries.rows() != grid->total_points || entries.cols() != grid->total_points)
    throw ConfigError("make_kernel: entry matrix does not match grid");
  return Kernel{std::move(entries), std::move(grid), tag};
}

Kernel zero_kernel(GridPtr grid, SymmetryTag tag) {
  const Index n = grid->total_points;
  return Kernel{CMatrix::Zero(n, n), std::move(grid), tag};
}

Kernel identity_kernel(GridPtr grid) {
  const Index n = grid->total_points;
  CMatrix e = CMatrix::Identity(n, n) / grid->weight;
  return Kernel{std::move(e), std::move(grid), SymmetryTag::self_adjoint};
}

Kernel compose(const Kernel& a, const Kernel& b) {
  require_same_grid(a.grid, b.grid, "compose");
  return Kernel{a.grid->weight * (a.entries * b.entries), a.grid, SymmetryTag::general};
}

Kernel ktranspose(const Kernel& a) {
  return Kernel{a.entries.transpose(), a.grid,
                a.tag == SymmetryTag::symmetric ? SymmetryTag::symmetric
                                                : SymmetryTag::general};
}

Kernel kconj(const Kernel& a) { return Kernel{a.entries.conjugate(), a.grid, a.tag}; }

Kernel kadjoint(const Kernel& a) {
  return Kernel{a.entries.adjoint(), a.grid,
                a.tag == SymmetryTag::self_adjoint ? SymmetryTag::self_adjoint
                                                   : SymmetryTag::general};
}

double kernel_l2_norm(const Kernel& a) { return a.grid->weight * a.entries.norm(); }

double asymmetry_l2(const Kernel& a) {
  return a.grid->weight * (a.entries - a.entries.transpose()).norm();
}

double operator_norm(const Kernel& a, double tol, int max_iter) {
  const CMatrix z = weighted(a);
  const Index n = z.rows();
  if (z.norm() < 1e-300) return 0.0;
  // deterministic start vector with no special symmetry
  CVector v(n);
  for (Index j = 0; j < n; ++j)
    v(j) = Complex(std::cos(0.7 * double(j) + 0.3), std::sin(1.3 * double(j) + 0.1));
  v.normalize();
  double s_old = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    CVector zv = z * v;
    const double s = zv.norm();
    v = z.adjoint() * zv;
    const double nv = v.norm();
    if (nv < 1e-300) return 0.0;
    v /= nv;
    if (std::abs(s - s_old) <= tol * std::max(1.0, s)) return s;
    s_old = s;
  }
  return s_old;
}

TakagiFactorization takagi(const Kernel& a) {
  const CMatrix z = weighted(a);
  const double scale = std::max(1.0, z.norm());
  if ((z - z.transpose()).norm() > 1e-9 * scale)
    throw NumericalError("takagi: input kernel is not symmetric");
  for (double btol : {1e-12, 1e-9, 1e-6}) {
    TakagiResult r = takagi_weighted(z, btol);
    const double err =
        (r.u * r.sigma.asDiagonal() * r.u.transpose() - 0.5 * (z + z.transpose()))
            .norm();
    if (err <= 1e-10 * scale) return TakagiFactorization{std::move(r.u), std::move(r.sigma)};
  }
  throw NumericalError("takagi: factorization did not reach tolerance");
}

ShChPair sh_ch_from_k(const Kernel& k) {
  TakagiFactorization tk = takagi(k);
  const double w = k.grid->weight;
  RVector sh_f = tk.sigma.array().sinh();
  RVector ch_f = tk.sigma.array().cosh();
  Kernel sh{assemble_odd(tk, sh_f) / w, k.grid, SymmetryTag::symmetric};
  Kernel ch{assemble_even(tk, ch_f) / w, k.grid, SymmetryTag::self_adjoint};
  return ShChPair{std::move(sh), std::move(ch)};
}

Kernel zeta_from_k(const Kernel& k) {
  TakagiFactorization tk = takagi(k);
  RVector f = tk.sigma.array().tanh();
  return Kernel{assemble_odd(tk, f) / k.grid->weight, k.grid, SymmetryTag::symmetric};
}

Kernel k_from_zeta(const Kernel& zeta) {
  TakagiFactorization tk = takagi(zeta);
  if (tk.sigma.size() > 0 && tk.sigma(0) >= 1.0 - kChartMargin)
    throw NumericalError("k_from_zeta: |zeta|_op outside the chart");
  RVector f(tk.sigma.size());
  for (Index j = 0; j < f.size(); ++j) f(j) = std::atanh(tk.sigma(j));
  return Kernel{assemble_odd(tk, f) / zeta.grid->weight, zeta.grid, SymmetryTag::symmetric};
}

PairState::PairState(Kernel zeta) : zeta_(std::move(zeta)) {
  const double w = zeta_.grid->weight;
  const double scale = std::max(1.0, w * zeta_.entries.norm());
  if (w * (zeta_.entries - zeta_.entries.transpose()).norm() > 1e-9 * scale)
    throw NumericalError("pair state: zeta is not symmetric");
  zeta_.entries = (0.5 * (zeta_.entries + zeta_.entries.transpose())).eval();
  zeta_.tag = SymmetryTag::symmetric;

  tk_ = takagi(zeta_);
  if (tk_.sigma.size() > 0 && tk_.sigma(0) >= 1.0 - kChartMargin)
    throw NumericalError("pair state: |zeta|_op outside the chart");

  const Index n = tk_.sigma.size();
  RVector fsh(n), fch(n), fs2(n), fc2(n);
  for (Index j = 0; j < n; ++j) {
    const double t = tk_.sigma(j);
    const double c = std::sqrt(1.0 - t * t);
    fsh(j) = t / c;
    fch(j) = 1.0 / c;
    fs2(j) = 2.0 * t / (c * c);
    fc2(j) = (1.0 + t * t) / (c * c);
  }
  sh_ = Kernel{assemble_odd(tk_, fsh) / w, zeta_.grid, SymmetryTag::symmetric};
  ch_ = Kernel{assemble_even(tk_, fch) / w, zeta_.grid, SymmetryTag::self_adjoint};
  sh2k_ = Kernel{assemble_odd(tk_, fs2) / w, zeta_.grid, SymmetryTag::symmetric};
  ch2k_ = Kernel{assemble_even(tk_, fc2) / w, zeta_.grid, SymmetryTag::self_adjoint};
}

double PairState::zeta_op_norm() const {
  return tk_.sigma.size() > 0 ? tk_.sigma(0) : 0.0;
}

std::pair<Kernel, Kernel> doubled_kernels(const PairState& state) {
  return {state.sh2k(), state.ch2k()};
}

BogoliubovMatrix bogoliubov_from_k(const Kernel& k) {
  ShChPair sc = sh_ch_from_k(k);
  BogoliubovMatrix e;
  e.pp = sc.ch;
  e.pm = kconj(sc.sh);
  e.mp = sc.sh;
  e.mm = kconj(sc.ch);
  return e;
}

BogoliubovMatrix bogoliubov_from_zeta(const Kernel& zeta) {
  const double w = zeta.grid->weight;
  const Index n = zeta.grid->total_points;
  const CMatrix z = weighted(zeta);
  CMatrix ih = CMatrix::Identity(n, n) - z.conjugate() * z;
  ih = (0.5 * (ih + ih.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(ih);
  if (es.info() != Eigen::Success)
    throw NumericalError("bogoliubov_from_zeta: eigensolver failed");
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw NumericalError("bogoliubov_from_zeta: |zeta|_op outside the chart");
  RVector f = es.eigenvalues().array().rsqrt();
  CMatrix c = es.eigenvectors() * f.asDiagonal() * es.eigenvectors().adjoint();
  BogoliubovMatrix e;
  e.pp = Kernel{c / w, zeta.grid, SymmetryTag::self_adjoint};
  e.mp = Kernel{(z * c) / w, zeta.grid, SymmetryTag::symmetric};
  e.pm = kconj(e.mp);
  e.mm = kconj(e.pp);
  return e;
}

BogoliubovMatrix bogoliubov_exponential(const Kernel& k) {
  const double w = k.grid->weight;
  const Index n = k.grid->total_points;
  const CMatrix kw = weighted(k);
  CMatrix gen = CMatrix::Zero(2 * n, 2 * n);
  gen.topRightCorner(n, n) = kw.conjugate();
  gen.bottomLeftCorner(n, n) = kw;
  const CMatrix e = gen.exp();
  BogoliubovMatrix out;
  out.pp = Kernel{e.topLeftCorner(n, n) / w, k.grid, SymmetryTag::self_adjoint};
  out.pm = Kernel{e.topRightCorner(n, n) / w, k.grid, SymmetryTag::symmetric};
  out.mp = Kernel{e.bottomLeftCorner(n, n) / w, k.grid, SymmetryTag::symmetric};
  out.mm = Kernel{e.bottomRightCorner(n, n) / w, k.grid, SymmetryTag::self_adjoint};
  return out;
}

GroupResiduals check_group_properties(const BogoliubovMatrix& e) {
  const double w = e.pp.grid->weight;
  const Index n = e.pp.grid->total_points;
  const CMatrix p = w * e.pp.entries, q = w * e.pm.entries;
  const CMatrix r = w * e.mp.entries, s = w * e.mm.entries;
  const CMatrix id = CMatrix::Identity(n, n);

  GroupResiduals res;
  res.sigma_reality =
      std::max((r - q.conjugate()).norm(), (s - p.conjugate()).norm());

  const CMatrix t11 = p.adjoint() * p - r.adjoint() * r - id;
  const CMatrix t12 = p.adjoint() * q - r.adjoint() * s;
  const CMatrix t22 = q.adjoint() * q - s.adjoint() * s + id;
  res.unn = std::max({t11.norm(), t12.norm(), t22.norm()});

  const CMatrix b11 = p.transpose() * r - r.transpose() * p;
  const CMatrix b12 = p.transpose() * s - r.transpose() * q - id;
  const CMatrix b22 = q.transpose() * s - s.transpose() * q;
  res.symplectic = std::max({b11.norm(), b12.norm(), b22.norm()});
  return res;
}

double bogoliubov_block_distance(const BogoliubovMatrix& a, const BogoliubovMatrix& b) {
  const double w = a.pp.grid->weight;
  return std::max({w * (a.pp.entries - b.pp.entries).norm(),
                   w * (a.pm.entries - b.pm.entries).norm(),
                   w * (a.mp.entries - b.mp.entries).norm(),
                   w * (a.mm.entries - b.mm.entries).norm()});
}

PairPathDerivatives pair_path_derivatives(const PairState& state, const CMatrix& dzeta) {
  const double w = state.grid()->weight;
  const TakagiFactorization& tk = state.factorization();
  const Index n = tk.sigma.size();

  const CMatrix z = w * state.zeta().entries;
  const CMatrix dz = w * dzeta;
  const CMatrix wb = tk.u.conjugate();  // eigenbasis of X = conj(z) z
  RVector lam(n);
  for (Index j = 0; j < n; ++j) lam(j) = tk.sigma(j) * tk.sigma(j);

  const CMatrix xdot = dz.conjugate() * z + z.conjugate() * dz;
  const CMatrix xw = wb.adjoint() * xdot * wb;

  const RMatrix dd_c = divided_difference_table(lam, &fc_div);
  const RMatrix dd_g = divided_difference_table(lam, &gk_div);

  const CMatrix dC = wb * xw.cwiseProduct(dd_c.cast<Complex>()) * wb.adjoint();
  const CMatrix dG = wb * xw.cwiseProduct(dd_g.cast<Complex>()) * wb.adjoint();

  RVector gvals(n);
  for (Index j = 0; j < n; ++j) gvals(j) = gk_value(lam(j));
  const CMatrix gmat = wb * gvals.asDiagonal() * wb.adjoint();

  const CMatrix chw = w * state.ch().entries;
  const CMatrix shw = w * state.sh().entries;

  PairPathDerivatives out;
  const CMatrix dsh = dz * chw + z * dC;  // sh = zeta o (1 - conj(zeta) zeta)^(-1/2)
  out.dsh = dsh / w;
  out.dch = dC / w;
  out.dk = (dz * gmat + z * dG) / w;
  out.dsh2k = (2.0 * (dsh * chw + shw * dC)) / w;
  out.dch2k = (2.0 * (dsh.conjugate() * shw + shw.conjugate() * dsh)) / w;
  return out;
}

KPathDerivatives k_path_derivatives(const Kernel& k, const CMatrix& dk) {
  const double w = k.grid->weight;
  const Index n = k.grid->total_points;
  const CMatrix kw = w * k.entries;
  const CMatrix dkw = w * dk;

  CMatrix big = CMatrix::Zero(4 * n, 4 * n);
  auto put = [&](Index r, Index c, const CMatrix& m) { big.block(r * n, c * n, n, n) = m; };
  put(0, 1, kw.conjugate());
  put(1, 0, kw);
  put(2, 3, kw.conjugate());
  put(3, 2, kw);
  put(0, 3, dkw.conjugate());
  put(1, 2, dkw);
  const CMatrix e = big.exp();

  const CMatrix chw = e.block(0, 0, n, n);
  const CMatrix shw = e.block(n, 0, n, n);
  const CMatrix chbw = e.block(n, n, n, n);
  const CMatrix dchw = e.block(0, 2 * n, n, n);
  const CMatrix dshw = e.block(n, 2 * n, n, n);
  const CMatrix dchbw = e.block(n, 3 * n, n, n);

  KPathDerivatives out;
  out.sh = Kernel{shw / w, k.grid, SymmetryTag::symmetric};
  out.ch = Kernel{chw / w, k.grid, SymmetryTag::self_adjoint};
  const CMatrix zw = chbw.partialPivLu().solve(shw);
  out.zeta = Kernel{zw / w, k.grid, SymmetryTag::symmetric};
  out.dsh = dshw / w;
  out.dch = dchw / w;
  out.dzeta = chbw.partialPivLu().solve(dshw - dchbw * zw) / w;
  return out;
}

}  // namespace pairex
