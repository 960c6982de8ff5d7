#pragma once

// Algebra of two-point kernels under the quadrature-weighted composition
//
//   (A o B)(x,y) = h^dim * sum_z A(x,z) B(z,y),
//
// so the matrix of kernel values times h^dim multiplies like an ordinary
// matrix and the identity element (discrete delta) has entries I / h^dim.
//
// Matrix functions of a symmetric kernel k go through the Takagi
// factorization w*k = U diag(sigma) U^T with U unitary:
//
//   sh(k) = U sinh(sigma) U^T,   ch(k) = conj(U) cosh(sigma) U^T,
//   th(k) = U tanh(sigma) U^T  (the bounded chart coordinate zeta).
//
// These agree with the odd/even composition power series in k, conj(k).

#include <utility>

#include "pairex/grid.hpp"

namespace pairex {

enum class SymmetryTag { symmetric, self_adjoint, general };

struct Kernel {
  CMatrix entries;  // kernel values, n x n
  GridPtr grid;
  SymmetryTag tag = SymmetryTag::general;
};

Kernel make_kernel(GridPtr grid, CMatrix entries, SymmetryTag tag = SymmetryTag::general);
Kernel zero_kernel(GridPtr grid, SymmetryTag tag = SymmetryTag::general);
Kernel identity_kernel(GridPtr grid);  // discrete delta, entries I / h^dim

Kernel compose(const Kernel& a, const Kernel& b);
Kernel ktranspose(const Kernel& a);
Kernel kconj(const Kernel& a);
Kernel kadjoint(const Kernel& a);

// L2(dx dy) norm: h^dim * frobenius of entries
double kernel_l2_norm(const Kernel& a);
double asymmetry_l2(const Kernel& a);  // L2 norm of A - A^T

// largest singular value of the weighted matrix, by power iteration
double operator_norm(const Kernel& a, double tol = 1e-10, int max_iter = 500);

struct TakagiFactorization {
  CMatrix u;      // unitary; h^dim * A = u * sigma.asDiagonal() * u.transpose()
  RVector sigma;  // nonnegative, descending
};

TakagiFactorization takagi(const Kernel& a);

struct ShChPair {
  Kernel sh;
  Kernel ch;
};

ShChPair sh_ch_from_k(const Kernel& k);
Kernel zeta_from_k(const Kernel& k);
Kernel k_from_zeta(const Kernel& zeta);

inline constexpr double kChartMargin = 1e-6;  // reject |zeta|_op >= 1 - margin

// Evolving pair coordinate with its derived kernels, all from one Takagi
// factorization of zeta. Construction enforces symmetry and the chart bound.
class PairState {
 public:
  explicit PairState(Kernel zeta);

  const Kernel& zeta() const { return zeta_; }
  const Kernel& sh() const { return sh_; }
  const Kernel& ch() const { return ch_; }
  const Kernel& sh2k() const { return sh2k_; }
  const Kernel& ch2k() const { return ch2k_; }
  const TakagiFactorization& factorization() const { return tk_; }
  double zeta_op_norm() const;
  const GridPtr& grid() const { return zeta_.grid; }

 private:
  Kernel zeta_;
  TakagiFactorization tk_;
  Kernel sh_, ch_, sh2k_, ch2k_;
};

std::pair<Kernel, Kernel> doubled_kernels(const PairState& state);  // sh(2k), ch(2k)

// Bogoliubov group element [[P, Q], [conj(Q), conj(P)]] with P = ch, Q = conj(sh)
struct BogoliubovMatrix {
  Kernel pp, pm, mp, mm;
};

BogoliubovMatrix bogoliubov_from_k(const Kernel& k);
// E_zeta from the factorized form, via Hermitian inverse square roots
// (independent of the Takagi route)
BogoliubovMatrix bogoliubov_from_zeta(const Kernel& zeta);
// dense exponential of the 2n x 2n generator [[0, conj(k)], [k, 0]]
BogoliubovMatrix bogoliubov_exponential(const Kernel& k);

struct GroupResiduals {
  double sigma_reality = 0.0;
  double unn = 0.0;
  double symplectic = 0.0;
};

GroupResiduals check_group_properties(const BogoliubovMatrix& e);
double bogoliubov_block_distance(const BogoliubovMatrix& a, const BogoliubovMatrix& b);

// Directional derivatives along a path: given zeta(t) and d/dt zeta, the
// derivatives of the derived kernels by the Daleckii-Krein formula in the
// Takagi basis. Entries are kernel values (unweighted).
struct PairPathDerivatives {
  CMatrix dsh, dch, dsh2k, dch2k, dk;
};

PairPathDerivatives pair_path_derivatives(const PairState& state, const CMatrix& dzeta);

// Same information from a k-path: Frechet derivative of the block exponential
// exp([[0, conj(k)], [k, 0]]), exact via the doubled-matrix trick.
struct KPathDerivatives {
  Kernel sh, ch, zeta;       // values at k
  CMatrix dsh, dch, dzeta;   // derivatives along dk
};

KPathDerivatives k_path_derivatives(const Kernel& k, const CMatrix& dk);

}  // namespace pairex
