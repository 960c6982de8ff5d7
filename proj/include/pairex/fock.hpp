#pragma once

// Exact oracle on a truncated bosonic Fock space over the lattice of grid
// points. Occupation-number basis with total particle number <= n_max.
//
// Lattice convention a_x ~ a_j / sqrt(h^dim), so with w = h^dim:
//
//   A(phi)   = sum_j sqrt(w) (conj(phi_j) a_j - phi_j adag_j)
//   B(k)     = (w/2) sum_jl (conj(k_jl) a_j a_l - k_jl adag_j adag_l)
//   H        = sum_jl D_jl adag_j a_l - (1/2N) sum_jl v_N(x_j - x_l) adag_j adag_l a_j a_l
//
// with D the spectral Laplacian matrix of the grid. A two-particle state
// with symmetric wavefunction f has occupation coefficients
// sqrt(2) w f_jl on |1_j 1_l> and w f_jj on |2_j>.

#include <Eigen/Sparse>

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "pairex/kernel.hpp"
#include "pairex/potential.hpp"

namespace pairex {

using SpMat = Eigen::SparseMatrix<Complex>;

struct FockSpace {
  GridPtr grid;
  int sites = 0;
  int n_max = 0;
  double weight = 0.0;  // h^dim
  Index dim = 0;
  std::vector<std::vector<std::uint8_t>> basis;     // occupation vectors
  std::vector<Index> sector_begin;                  // offsets per total number, size n_max+2
  std::unordered_map<std::uint64_t, Index> lookup;  // encoded occupation -> index

  Index find(const std::vector<std::uint8_t>& occ) const;  // -1 if truncated away
  int total_number(Index i) const;
  static std::uint64_t encode(const std::vector<std::uint8_t>& occ);
};

using FockSpacePtr = std::shared_ptr<const FockSpace>;

int default_n_max(double N);  // ceil(N + 6 sqrt(N)) + 4
FockSpacePtr build_space(GridPtr grid, int n_max);

struct FockVector {
  CVector coeffs;
  FockSpacePtr space;
};

FockVector vacuum(FockSpacePtr space);
double fock_norm(const FockVector& v);
Complex overlap(const FockVector& a, const FockVector& b);
double fidelity(const FockVector& a, const FockVector& b);
// norm^2 fraction carried by the top `sectors` total-number sectors
double tail_mass(const FockVector& v, int sectors = 2);

std::pair<SpMat, SpMat> ladder(const FockSpace& s, int site);  // (a_j, adag_j)
SpMat number_operator(const FockSpace& s);
SpMat weyl_generator(const FockSpace& s, const CVector& phi);
SpMat squeeze_generator(const FockSpace& s, const CMatrix& k);
// I(L) for L = [[d, l], [k, -d^T]] in the quadratic-representation ordering
SpMat quadratic_rep(const FockSpace& s, const CMatrix& d, const CMatrix& k,
                    const CMatrix& l);
SpMat fock_hamiltonian(const FockSpace& s, const Potential& v);
// P3 = [A, V]; cubic interaction term
SpMat cubic_term(const FockSpace& s, const CVector& phi, const Potential& v);

// y = exp(t * A) v by Arnoldi with adaptive substeps
CVector expmv(const SpMat& a, const CVector& v, Complex t, double tol = 1e-12,
              int krylov_dim = 40);

// e^{-sqrt(N) A(phi)} |0>
FockVector coherent_state(FockSpacePtr space, const CVector& phi, double N);
// e^{-sqrt(N) A(phi)} e^{-B(k)} |0>
FockVector approx_state(FockSpacePtr space, const CVector& phi, const CMatrix& k,
                        double N);
// psi(t) = e^{i t H} psi0, convention (1/i) d/dt psi = H psi
FockVector exact_evolve(const FockVector& psi0, double t, const SpMat& h,
                        double tol = 1e-12);

// sector components as lattice functions
Complex sector0(const FockVector& v);
CVector sector1_function(const FockVector& v);
CMatrix sector2_function(const FockVector& v);
double sector_norm(const FockVector& v, int n);

struct HredComponents {
  Complex x0;
  CVector x1;   // lattice function
  CMatrix x2;   // symmetric lattice function
  double x3_norm = 0.0;
  double x4_norm = 0.0;
  double tail = 0.0;  // largest top-two-sector mass seen among intermediates
};

// assembles H_red |0> with central-difference operator time derivatives and
// extracts the sector components
HredComponents numeric_hred_vacuum(FockSpacePtr space, const CVector& phi,
                                   const CVector& dphi, const CMatrix& k,
                                   const CMatrix& dk, double N, const Potential& v,
                                   double eps_t = 1e-5);

}  // namespace pairex
