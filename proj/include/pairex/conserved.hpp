#pragma once

// Diagnostics and variational structure: conserved densities, the energy
// functional, the Lagrangian density X0, the Euler-Lagrange expressions X1
// and X2, and finite-difference consistency checks.
//
// X0 is evaluated at an instant from (phi, d/dt phi, zeta, d/dt zeta). The
// instantaneous directional derivative of X0 differs from the X1/X2 pairing
// by a total time derivative (the central scalar generated when the
// variation is commuted past the time-derivative operator); the checks below
// account for it explicitly.

#include <string>

#include "pairex/dynamics.hpp"

namespace pairex {

struct MassBreakdown {
  double total = 0.0;
  double condensate = 0.0;
  double pair_part = 0.0;  // |sh|_L2^2, enters total divided by N
};

MassBreakdown total_mass(const Field& phi, const PairState& pair, double N);

RVector total_momentum(const Field& phi, const PairState& pair, double N);

struct EnergyBreakdown {
  double kinetic_phi = 0.0;        // N int |grad phi|^2
  double interaction_pair = 0.0;   // (N/2) int v |phi phi + (sh o ch)/N|^2
  double cubic = 0.0;              // (1/2) int v |phi_1 sh_23 + phi_2 sh_13|^2
  double kinetic_pair = 0.0;       // (1/2) int |grad_{1,2} sh|^2
  double quartic_pair = 0.0;       // (1/4N) int v (|sh o conj sh|^2 + rho_p rho_p)
  double total = 0.0;
};

EnergyBreakdown total_energy(const Field& phi, const PairState& pair,
                             const Potential& v, double N);

// X0 from the explicit six-term expression; sh o ch is evaluated as sh(2k)/2
double lagrangian_density_x0(const Field& phi, const CVector& dphi,
                             const PairState& pair, const CMatrix& dzeta,
                             const Potential& v, double N);

// X1 = -sqrt(N) (conj(ch) o Har + sh o conj(Har)) with the corrected Hartree field
Field analytic_x1(const Field& phi, const CVector& dphi, const PairState& pair,
                  const Potential& v, double N);

// production route: conjugated zeta-form
Kernel analytic_x2(const Field& phi, const CVector& dphi, const PairState& pair,
                   const CMatrix& dzeta, const Potential& v, double N);
// verbatim direct evaluation (all 1/N lines plus symmetrization); cross-check only
Kernel analytic_x2_direct(const Field& phi, const CVector& dphi, const PairState& pair,
                          const CMatrix& dzeta, const Potential& v, double N);

struct VariationalCheck {
  double derivative = 0.0;  // boundary-corrected central difference of X0
  double pairing = 0.0;     // analytic pairing with X1 (resp. X2)
  double relative_error = 0.0;
};

VariationalCheck variational_check_phi(const Field& phi, const CVector& dphi,
                                       const PairState& pair, const CMatrix& dzeta,
                                       const Potential& v, double N,
                                       const CVector& direction, double eps);

VariationalCheck variational_check_zeta(const Field& phi, const CVector& dphi,
                                        const PairState& pair, const CMatrix& dzeta,
                                        const Potential& v, double N,
                                        const CMatrix& direction, double eps);

struct DiagnosticsRecord {
  double time = 0.0;
  double mass_total = 0.0;
  double mass_condensate = 0.0;
  double mass_pair = 0.0;
  RVector momentum;
  double energy_total = 0.0;
  double zeta_op_norm = 0.0;
  double x0 = 0.0;
};

// record with analytic time derivatives from the equations of motion
DiagnosticsRecord diagnostics(const EvolutionState& s, const Potential& v);

std::string diagnostics_csv_header(int dim);
std::string diagnostics_csv_row(const DiagnosticsRecord& r);

}  // namespace pairex
