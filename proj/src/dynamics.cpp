#include "pairex/dynamics.hpp"

#include <cmath>

namespace pairex {

namespace {

// operator part of the Hartree generator (everything except -Delta delta)
CMatrix hartree_operator_part(const HartreeKernels& hk, double N, EvolutionMode mode,
                              const CouplingKnobs& knobs) {
  if (mode == EvolutionMode::coupled && knobs.alpha_p_in_g)
    return hk.alpha_c + hk.alpha_p / N;
  return hk.alpha_c;
}

struct BoundedRhs {
  CVector dphi;
  CMatrix dzeta;
};

// right-hand sides without the kinetic term (handled spectrally by splitting)
BoundedRhs bounded_rhs(const Grid& g, const CVector& phi, const PairState& pair,
                       const Potential& v, double N, EvolutionMode mode,
                       const CouplingKnobs& knobs) {
  const double w = g.weight;
  const Index n = g.total_points;
  BoundedRhs out;

  if (mode == EvolutionMode::mean_field_only) {
    const RVector rho_c = phi.cwiseAbs2();
    const RVector vr = w * (v.difference * rho_c);
    out.dphi = I1 * (-(vr.array().cast<Complex>() * phi.array())).matrix();
    out.dzeta = CMatrix::Zero(n, n);
    return out;
  }

  HartreeKernels hk = build_hartree_kernels(Field{phi, pair.grid()}, pair, v);
  const CMatrix& zv = pair.zeta().entries;

  if (mode == EvolutionMode::uncoupled_gm) {
    // old system: Hartree phi, S(zeta) = m + zeta o conj(m) o zeta
    out.dphi = I1 * (-(hk.conv_rho_c.array().cast<Complex>() * phi.array())).matrix();
    const CMatrix mker =
        (-v.difference.array().cast<Complex>() * (phi * phi.transpose()).array())
            .matrix();
    const CMatrix quad = w * w * (zv * mker.conjugate() * zv);
    const CMatrix lin = w * (hk.alpha_c.transpose() * zv + zv * hk.alpha_c);
    out.dzeta = I1 * (mker + quad - lin);
    return out;
  }

  // coupled system
  CMatrix theta = (phi * phi.transpose());
  if (knobs.theta_pair) theta += pair.sh2k().entries / (2.0 * N);
  theta = (-v.difference.array().cast<Complex>() * theta.array()).matrix();

  const CMatrix alpha = hartree_operator_part(hk, N, mode, knobs);

  out.dphi = I1 * (w * (theta * phi.conjugate()));
  if (knobs.alpha_p_in_phi)
    out.dphi -= I1 * ((w / N) * (hk.alpha_p.transpose() * phi));

  const CMatrix quad = w * w * (zv * theta.conjugate() * zv);
  const CMatrix lin = w * (alpha.transpose() * zv + zv * alpha);
  out.dzeta = I1 * (theta + quad - lin);
  return out;
}

}  // namespace

HartreeKernels build_hartree_kernels(const Field& phi, const PairState& pair,
                                     const Potential& v) {
  require_same_grid(phi.grid, pair.grid(), "build_hartree_kernels");
  require_same_grid(phi.grid, v.grid, "build_hartree_kernels");
  const Grid& g = *phi.grid;
  const double w = g.weight;

  HartreeKernels hk;
  hk.omega_c = phi.values.conjugate() * phi.values.transpose();
  const CMatrix& sh = pair.sh().entries;
  hk.omega_p = w * (sh.conjugate() * sh);
  hk.rho_c = phi.values.cwiseAbs2();
  hk.rho_p = w * sh.cwiseAbs2().rowwise().sum();
  hk.conv_rho_c = w * (v.difference * hk.rho_c);
  hk.conv_rho_p = w * (v.difference * hk.rho_p);

  hk.alpha_c = v.difference.cast<Complex>().cwiseProduct(hk.omega_c);
  hk.alpha_c += (hk.conv_rho_c / w).cast<Complex>().asDiagonal();
  hk.alpha_p = v.difference.cast<Complex>().cwiseProduct(hk.omega_p);
  hk.alpha_p += (hk.conv_rho_p / w).cast<Complex>().asDiagonal();
  return hk;
}

Kernel theta_kernel(const Field& phi, const PairState& pair, const Potential& v,
                    double N, bool include_pair_term) {
  require_same_grid(phi.grid, v.grid, "theta_kernel");
  CMatrix t = phi.values * phi.values.transpose();
  if (include_pair_term) t += pair.sh2k().entries / (2.0 * N);
  t = (-v.difference.array().cast<Complex>() * t.array()).matrix();
  return Kernel{std::move(t), phi.grid, SymmetryTag::symmetric};
}

Kernel m_kernel(const Field& phi, const Potential& v) {
  require_same_grid(phi.grid, v.grid, "m_kernel");
  CMatrix t = phi.values * phi.values.transpose();
  t = (-v.difference.array().cast<Complex>() * t.array()).matrix();
  return Kernel{std::move(t), phi.grid, SymmetryTag::symmetric};
}

Field rhs_phi(const Field& phi, const PairState& pair, const HartreeKernels& hk,
              const Kernel& theta, const Potential& v, EvolutionMode mode,
              const CouplingKnobs& knobs) {
  const Grid& g = *phi.grid;
  const double w = g.weight;
  CVector lap = apply_laplacian(g, phi.values);
  CVector d;
  if (mode == EvolutionMode::mean_field_only || mode == EvolutionMode::uncoupled_gm) {
    d = I1 * (lap - (hk.conv_rho_c.array().cast<Complex>() * phi.values.array()).matrix());
  } else {
    d = I1 * (lap + w * (theta.entries * phi.values.conjugate()));
    if (knobs.alpha_p_in_phi)
      d -= I1 * ((w / v.N) * (hk.alpha_p.transpose() * phi.values));
  }
  return Field{std::move(d), phi.grid};
}

Kernel rhs_zeta(const Field& phi, const PairState& pair, const HartreeKernels& hk,
                const Kernel& theta, const Potential& v, EvolutionMode mode,
                const CouplingKnobs& knobs) {
  const Grid& g = *phi.grid;
  const double w = g.weight;
  if (mode == EvolutionMode::mean_field_only)
    return zero_kernel(phi.grid, SymmetryTag::symmetric);

  const CMatrix& zv = pair.zeta().entries;
  const CMatrix th = (mode == EvolutionMode::uncoupled_gm)
                         ? m_kernel(phi, v).entries
                         : theta.entries;
  const CMatrix alpha =
      (mode == EvolutionMode::uncoupled_gm)
          ? hk.alpha_c
          : hartree_operator_part(hk, v.N, mode, knobs);

  const CMatrix kinetic = g.laplacian.cast<Complex>() * zv + zv * g.laplacian.cast<Complex>();
  const CMatrix quad = w * w * (zv * th.conjugate() * zv);
  const CMatrix lin = w * (alpha.transpose() * zv + zv * alpha);
  CMatrix d = I1 * (th + quad + kinetic - lin);
  return Kernel{std::move(d), phi.grid, SymmetryTag::symmetric};
}

StateDerivative evaluate_rhs(const EvolutionState& s, const Potential& v,
                             const CouplingKnobs& knobs) {
  PairState pair(s.zeta);
  HartreeKernels hk = build_hartree_kernels(s.phi, pair, v);
  Kernel theta = theta_kernel(s.phi, pair, v, v.N,
                              s.mode == EvolutionMode::coupled && knobs.theta_pair);
  StateDerivative out;
  out.dphi = rhs_phi(s.phi, pair, hk, theta, v, s.mode, knobs).values;
  out.dzeta = rhs_zeta(s.phi, pair, hk, theta, v, s.mode, knobs).entries;
  return out;
}

EvolutionState step_strang(const EvolutionState& s, const Potential& v, double dt,
                           const CouplingKnobs& knobs) {
  if (!(dt > 0.0)) throw ConfigError("step_strang: dt must be positive");
  const Grid& g = *s.phi.grid;
  const Index n = g.total_points;
  const double w = g.weight;

  auto half_kinetic = [&](CVector& phi, CMatrix& zeta) {
    phi = kinetic_phase(g, phi, 0.5 * dt);
    CMatrix zh = g.dft * zeta * g.dft;  // dft is symmetric, so this is the double transform
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < n; ++c)
        zh(r, c) *= std::polar(1.0, (g.laplacian_symbol(r) + g.laplacian_symbol(c)) * 0.5 * dt);
    zeta = g.idft * zh * g.idft;
  };

  CVector phi = s.phi.values;
  CMatrix zeta = s.zeta.entries;
  half_kinetic(phi, zeta);

  // classical RK4 on the bounded remainder
  auto f = [&](const CVector& p, const CMatrix& z) {
    PairState pair(Kernel{z, s.phi.grid, SymmetryTag::symmetric});
    return bounded_rhs(g, p, pair, v, v.N, s.mode, knobs);
  };
  try {
    BoundedRhs k1 = f(phi, zeta);
    BoundedRhs k2 = f(phi + 0.5 * dt * k1.dphi, zeta + 0.5 * dt * k1.dzeta);
    BoundedRhs k3 = f(phi + 0.5 * dt * k2.dphi, zeta + 0.5 * dt * k2.dzeta);
    BoundedRhs k4 = f(phi + dt * k3.dphi, zeta + dt * k3.dzeta);
    phi += (dt / 6.0) * (k1.dphi + 2.0 * k2.dphi + 2.0 * k3.dphi + k4.dphi);
    zeta += (dt / 6.0) * (k1.dzeta + 2.0 * k2.dzeta + 2.0 * k3.dzeta + k4.dzeta);
  } catch (const NumericalError& err) {
    throw NumericalError(std::string(err.what()) + " (during nonlinear stage)", s.time);
  }

  half_kinetic(phi, zeta);

  const double asym = w * (zeta - zeta.transpose()).norm();
  if (!(asym < 1e-9))
    throw NumericalError("step_strang: zeta symmetry violated", s.time + dt);
  zeta = (0.5 * (zeta + zeta.transpose())).eval();

  if (!phi.allFinite() || !zeta.allFinite() || phi.norm() > 1e6 || zeta.norm() > 1e6)
    throw NumericalError("step_strang: field blow-up", s.time + dt);

  EvolutionState next;
  next.time = s.time + dt;
  next.phi = Field{std::move(phi), s.phi.grid};
  next.zeta = Kernel{std::move(zeta), s.zeta.grid, SymmetryTag::symmetric};
  next.mode = s.mode;
  return next;
}

Trajectory evolve(EvolutionState initial, const Potential& v, const EvolveParams& p,
                  const CouplingKnobs& knobs) {
  if (!(p.dt > 0.0)) throw ConfigError("evolve: dt must be positive");
  if (p.t_final < 0.0) throw ConfigError("evolve: t_final must be nonnegative");

  Trajectory traj;
  traj.states.push_back(initial);
  if (p.t_final == 0.0) return traj;

  const long total_steps = std::lround(p.t_final / p.dt);
  if (total_steps <= 0) throw ConfigError("evolve: t_final shorter than one step");
  long stride = p.output_interval > 0.0 ? std::lround(p.output_interval / p.dt) : total_steps;
  if (stride <= 0) stride = 1;

  EvolutionState s = std::move(initial);
  for (long step = 1; step <= total_steps; ++step) {
    s = step_strang(s, v, p.dt, knobs);
    if (step % stride == 0 || step == total_steps) traj.states.push_back(s);
  }
  return traj;
}

EquationFormResiduals residual_equation_forms(const EvolutionState& before,
                                              const EvolutionState& at,
                                              const EvolutionState& after,
                                              const Potential& v) {
  const Grid& g = *at.phi.grid;
  const double w = g.weight;
  const double dt = 0.5 * (after.time - before.time);
  if (!(dt > 0.0))
    throw NumericalError("residual_equation_forms: snapshots not time-ordered");

  PairState pm(before.zeta), p0(at.zeta), pp(after.zeta);
  HartreeKernels hk = build_hartree_kernels(at.phi, p0, v);

  const bool coupled = at.mode == EvolutionMode::coupled;
  const CMatrix th = coupled ? theta_kernel(at.phi, p0, v, v.N).entries
                             : m_kernel(at.phi, v).entries;
  const CMatrix alpha = coupled ? CMatrix(hk.alpha_c + hk.alpha_p / v.N) : hk.alpha_c;

  // S(u) = (1/i) u_t + g^T o u + u o g with g = -Delta delta + alpha
  auto sform_of = [&](const CMatrix& du, const CMatrix& u) {
    CMatrix r = du / I1;
    r -= g.laplacian.cast<Complex>() * u + u * g.laplacian.cast<Complex>();
    r += w * (alpha.transpose() * u + u * alpha);
    return r;
  };
  // W(p) = (1/i) p_t + [g^T, p]
  auto wform_of = [&](const CMatrix& dp, const CMatrix& pk) {
    CMatrix r = dp / I1;
    r -= g.laplacian.cast<Complex>() * pk - pk * g.laplacian.cast<Complex>();
    r += w * (alpha.transpose() * pk - pk * alpha.transpose());
    return r;
  };

  EquationFormResiduals out;

  const CMatrix dsh2k = (pp.sh2k().entries - pm.sh2k().entries) / (2.0 * dt);
  const CMatrix& sh2k = p0.sh2k().entries;
  const CMatrix& ch2k = p0.ch2k().entries;
  CMatrix sres = sform_of(dsh2k, sh2k);
  sres -= w * (th * ch2k + ch2k.conjugate() * th);
  out.sform = w * sres.norm();

  if (!coupled) {
    const CMatrix dsh = (pp.sh().entries - pm.sh().entries) / (2.0 * dt);
    const CMatrix dchb = (pp.ch().entries.conjugate() - pm.ch().entries.conjugate()) / (2.0 * dt);
    const CMatrix& sh = p0.sh().entries;
    const CMatrix& ch = p0.ch().entries;
    const CMatrix chb = ch.conjugate();
    CMatrix lhs = sform_of(dsh, sh) - w * (chb * th);
    lhs = w * (lhs * ch);
    CMatrix rhs = wform_of(dchb, chb) + w * (sh * th.conjugate());
    rhs = w * (rhs * sh);
    out.linear_form = w * (lhs - rhs).norm();
  }
  return out;
}

}  // namespace pairex
