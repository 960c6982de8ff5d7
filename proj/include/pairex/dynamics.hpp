#pragma once

// Time evolution of the condensate / pair-excitation system in the bounded
// chart coordinate zeta:
//
//   (1/i) d/dt phi = Delta phi + int Theta conj(phi) - (1/N) int alpha_p^T phi
//   (1/i) d/dt zeta = Theta + zeta o conj(Theta) o zeta - g^T o zeta - zeta o g
//
// with Theta = -v_N (phi phi + sh(2k)/2N) and g = -Delta delta + alpha.
// Strang splitting: the -Delta part is solved exactly in Fourier space on
// both kernel indices, the bounded remainder by a classical RK4 stage.

#include <vector>

#include "pairex/kernel.hpp"
#include "pairex/potential.hpp"

namespace pairex {

enum class EvolutionMode { coupled, uncoupled_gm, mean_field_only };

struct EvolutionState {
  double time = 0.0;
  Field phi;
  Kernel zeta;
  EvolutionMode mode = EvolutionMode::coupled;
};

// per-term switches for the 1/N couplings; all on in coupled mode
struct CouplingKnobs {
  bool theta_pair = true;     // sh(2k)/2N term inside Theta
  bool alpha_p_in_g = true;   // alpha_p/N inside the Hartree operator
  bool alpha_p_in_phi = true; // alpha_p^T/N term in the phi equation
};

struct HartreeKernels {
  CMatrix omega_c, omega_p;        // kernel values
  RVector rho_c, rho_p;            // densities
  RVector conv_rho_c, conv_rho_p;  // v_N * rho
  CMatrix alpha_c, alpha_p;        // self-adjoint operator kernels
};

HartreeKernels build_hartree_kernels(const Field& phi, const PairState& pair,
                                     const Potential& v);

Kernel theta_kernel(const Field& phi, const PairState& pair, const Potential& v,
                    double N, bool include_pair_term = true);
Kernel m_kernel(const Field& phi, const Potential& v);

// full right-hand sides (kinetic term included)
Field rhs_phi(const Field& phi, const PairState& pair, const HartreeKernels& hk,
              const Kernel& theta, const Potential& v, EvolutionMode mode,
              const CouplingKnobs& knobs = {});
Kernel rhs_zeta(const Field& phi, const PairState& pair, const HartreeKernels& hk,
                const Kernel& theta, const Potential& v, EvolutionMode mode,
                const CouplingKnobs& knobs = {});

// convenience: both full right-hand sides from a state
struct StateDerivative {
  CVector dphi;
  CMatrix dzeta;
};
StateDerivative evaluate_rhs(const EvolutionState& s, const Potential& v,
                             const CouplingKnobs& knobs = {});

EvolutionState step_strang(const EvolutionState& s, const Potential& v, double dt,
                           const CouplingKnobs& knobs = {});

struct EvolveParams {
  double dt = 1e-3;
  double t_final = 1.0;
  double output_interval = 0.1;
};

struct Trajectory {
  std::vector<EvolutionState> states;  // t = 0, every interval, and t_final
};

Trajectory evolve(EvolutionState initial, const Potential& v, const EvolveParams& p,
                  const CouplingKnobs& knobs = {});

// Central-difference residuals of the doubled-kernel equation forms, from
// three adjacent snapshots. In coupled mode `sform` is the S-form with Theta
// and the corrected Hartree operator; in uncoupled-GM mode it is the old
// S-form with m, and `linear_form` the (sh, ch)-linear form.
struct EquationFormResiduals {
  double sform = 0.0;
  double linear_form = 0.0;
};

EquationFormResiduals residual_equation_forms(const EvolutionState& before,
                                              const EvolutionState& at,
                                              const EvolutionState& after,
                                              const Potential& v);

}  // namespace pairex
