#include "pairex/conserved.hpp"

#include <cmath>
#include <cstdio>

namespace pairex {

namespace {

// corrected Hartree field: (1/i) phi_t - Delta phi - int Theta conj(phi)
//                          + (1/N) int alpha_p^T phi
CVector hartree_field(const Field& phi, const CVector& dphi, const PairState& pair,
                      const Potential& v, double N) {
  const Grid& g = *phi.grid;
  const double w = g.weight;
  HartreeKernels hk = build_hartree_kernels(phi, pair, v);
  Kernel theta = theta_kernel(phi, pair, v, N);
  CVector h = dphi / I1;
  h -= apply_laplacian(g, phi.values);
  h -= w * (theta.entries * phi.values.conjugate());
  h += (w / N) * (hk.alpha_p.transpose() * phi.values);
  return h;
}

}  // namespace

MassBreakdown total_mass(const Field& phi, const PairState& pair, double N) {
  const double w = phi.grid->weight;
  MassBreakdown out;
  out.condensate = w * phi.values.squaredNorm();
  const double shl2 = w * pair.sh().entries.norm();
  out.pair_part = shl2 * shl2;
  out.total = out.condensate + out.pair_part / N;
  return out;
}

RVector total_momentum(const Field& phi, const PairState& pair, double N) {
  const Grid& g = *phi.grid;
  const double w = g.weight;
  RVector p = RVector::Zero(g.dim);
  const CMatrix& sh = pair.sh().entries;
  for (int a = 0; a < g.dim; ++a) {
    const CVector dphi = apply_gradient(g, a, phi.values);
    double pc = 0.0;
    for (Index j = 0; j < phi.values.size(); ++j)
      pc += std::imag(phi.values(j) * std::conj(dphi(j)));
    const CMatrix dsh = g.gradient[a] * sh;
    double pp = 0.0;
    for (Index c = 0; c < sh.cols(); ++c)
      for (Index r = 0; r < sh.rows(); ++r)
        pp += std::imag(sh(r, c) * std::conj(dsh(r, c)));
    p(a) = w * pc + (w * w / N) * pp;
  }
  return p;
}

EnergyBreakdown total_energy(const Field& phi, const PairState& pair,
                             const Potential& v, double N) {
  const Grid& g = *phi.grid;
  const double w = g.weight;
  const RMatrix& vd = v.difference;
  const CMatrix& sh = pair.sh().entries;

  EnergyBreakdown e;
  e.kinetic_phi = -N * w * phi.values.dot(apply_laplacian(g, phi.values)).real();

  const CMatrix a = phi.values * phi.values.transpose() + pair.sh2k().entries / (2.0 * N);
  e.interaction_pair = 0.5 * N * w * w * vd.cwiseProduct(a.cwiseAbs2()).sum();

  const CMatrix p_shsh = w * (sh * sh.conjugate());  // (sh o conj(sh))(x, y)
  const RVector rho_c = phi.values.cwiseAbs2();
  const RVector rho_p = p_shsh.diagonal().real();
  double cubic = (vd * rho_p).dot(rho_c);
  Complex cross = 0.0;
  for (Index l = 0; l < vd.cols(); ++l)
    for (Index j = 0; j < vd.rows(); ++j)
      cross += vd(j, l) * phi.values(j) * std::conj(phi.values(l)) * p_shsh(l, j);
  e.cubic = w * w * (cubic + cross.real());

  const CMatrix lap_sh = g.laplacian.cast<Complex>() * sh;
  double kin_pair = 0.0;
  for (Index c = 0; c < sh.cols(); ++c)
    for (Index r = 0; r < sh.rows(); ++r)
      kin_pair -= std::real(std::conj(sh(r, c)) * lap_sh(r, c));
  e.kinetic_pair = w * w * kin_pair;

  const double q1 = vd.cwiseProduct(p_shsh.cwiseAbs2()).sum();
  const double q2 = (vd * rho_p).dot(rho_p);
  e.quartic_pair = (w * w / (4.0 * N)) * (q1 + q2);

  e.total = e.kinetic_phi + e.interaction_pair + e.cubic + e.kinetic_pair + e.quartic_pair;
  return e;
}

double lagrangian_density_x0(const Field& phi, const CVector& dphi,
                             const PairState& pair, const CMatrix& dzeta,
                             const Potential& v, double N) {
  const double w = phi.grid->weight;
  const EnergyBreakdown e = total_energy(phi, pair, v, N);

  double phase_phi = 0.0;
  for (Index j = 0; j < phi.values.size(); ++j)
    phase_phi += std::imag(phi.values(j) * std::conj(dphi(j)));

  const PairPathDerivatives d = pair_path_derivatives(pair, dzeta);
  const CMatrix& sh = pair.sh().entries;
  double phase_sh = 0.0;
  for (Index c = 0; c < sh.cols(); ++c)
    for (Index r = 0; r < sh.rows(); ++r)
      phase_sh += std::imag(sh(r, c) * std::conj(d.dsh(r, c)));

  return N * w * phase_phi + 0.5 * w * w * phase_sh - e.total;
}

Field analytic_x1(const Field& phi, const CVector& dphi, const PairState& pair,
                  const Potential& v, double N) {
  const double w = phi.grid->weight;
  const CVector har = hartree_field(phi, dphi, pair, v, N);
  const CMatrix& sh = pair.sh().entries;
  const CMatrix& ch = pair.ch().entries;
  CVector x1 = -std::sqrt(N) * w * (ch.conjugate() * har + sh * har.conjugate());
  return Field{std::move(x1), phi.grid};
}

Kernel analytic_x2(const Field& phi, const CVector& dphi, const PairState& pair,
                   const CMatrix& dzeta, const Potential& v, double N) {
  const Grid& g = *phi.grid;
  const double w = g.weight;
  HartreeKernels hk = build_hartree_kernels(phi, pair, v);
  const Kernel theta = theta_kernel(phi, pair, v, N);
  const CMatrix alpha = hk.alpha_c + hk.alpha_p / N;
  const CMatrix& zv = pair.zeta().entries;

  CMatrix defect = dzeta / I1;
  defect -= g.laplacian.cast<Complex>() * zv + zv * g.laplacian.cast<Complex>();
  defect += w * (alpha.transpose() * zv + zv * alpha);
  defect -= theta.entries;
  defect -= w * w * (zv * theta.entries.conjugate() * zv);

  const CMatrix& ch = pair.ch().entries;
  CMatrix x2 = -(1.0 / std::sqrt(2.0)) * w * w * (ch.conjugate() * defect * ch);
  return Kernel{std::move(x2), phi.grid, SymmetryTag::symmetric};
}

Kernel analytic_x2_direct(const Field& phi, const CVector& dphi, const PairState& pair,
                          const CMatrix& dzeta, const Potential& v, double N) {
  const Grid& g = *phi.grid;
  const double w = g.weight;
  const RMatrix& vd = v.difference;
  HartreeKernels hk = build_hartree_kernels(phi, pair, v);
  const Kernel mk = m_kernel(phi, v);
  const PairPathDerivatives d = pair_path_derivatives(pair, dzeta);

  const CMatrix& sh = pair.sh().entries;
  const CMatrix& ch = pair.ch().entries;
  const CMatrix chb = ch.conjugate();
  const CMatrix shb = sh.conjugate();
  const CMatrix lap = g.laplacian.cast<Complex>();

  // old operators: g_N = -Delta delta + alpha_c, S and W built on it
  auto s_of = [&](const CMatrix& du, const CMatrix& u) {
    CMatrix r = du / I1;
    r -= lap * u + u * lap;
    r += w * (hk.alpha_c.transpose() * u + u * hk.alpha_c);
    return r;
  };
  auto w_of = [&](const CMatrix& dp, const CMatrix& p) {
    CMatrix r = dp / I1;
    r -= lap * p - p * lap;
    r += w * (hk.alpha_c.transpose() * p - p * hk.alpha_c.transpose());
    return r;
  };

  const CMatrix s_sh = s_of(d.dsh, sh);
  const CMatrix w_chb = w_of(d.dch.conjugate(), chb);
  CMatrix bracket = w * ((s_sh - w * (chb * mk.entries)) * ch);
  bracket -= w * ((w_chb + w * (sh * mk.entries.conjugate())) * sh);

  // the six 1/N lines
  const CMatrix q_ssh = w * (shb * sh);   // conj(sh) o sh
  const CMatrix p_shs = w * (sh * shb);   // sh o conj(sh)
  const RVector conv_rho_p = hk.conv_rho_p;

  CMatrix a14 = 2.0 * w * (chb * conv_rho_p.cast<Complex>().asDiagonal() * sh);
  CMatrix a2 = w * w * (chb * vd.cast<Complex>().cwiseProduct(q_ssh).transpose() * sh);
  CMatrix a3 = w * w * (chb * vd.cast<Complex>().cwiseProduct(p_shs) * sh);
  CMatrix sym_part = a14 + a2 + a3;
  sym_part = (0.5 * (sym_part + sym_part.transpose())).eval();

  const CMatrix a5 =
      w * w * (sh * vd.cast<Complex>().cwiseProduct(w * (shb * chb)) * sh);
  const CMatrix a6 =
      w * w * (chb * vd.cast<Complex>().cwiseProduct(w * (chb * sh)) * ch);

  CMatrix x2 = -(1.0 / std::sqrt(2.0)) * (bracket + (sym_part + a5 + a6) / N);
  return Kernel{std::move(x2), phi.grid, SymmetryTag::symmetric};
}

VariationalCheck variational_check_phi(const Field& phi, const CVector& dphi,
                                       const PairState& pair, const CMatrix& dzeta,
                                       const Potential& v, double N,
                                       const CVector& direction, double eps) {
  if (!(eps >= 1e-6 && eps <= 1e-3))
    throw ConfigError("variational_check_phi: eps outside [1e-6, 1e-3]");
  const double w = phi.grid->weight;

  Field phip{phi.values + eps * direction, phi.grid};
  Field phim{phi.values - eps * direction, phi.grid};
  const double xp = lagrangian_density_x0(phip, dphi, pair, dzeta, v, N);
  const double xm = lagrangian_density_x0(phim, dphi, pair, dzeta, v, N);
  const double fd = (xp - xm) / (2.0 * eps);

  // total-derivative term from commuting the variation past d/dt:
  // N Im int phi_t conj(h); note Eigen's dot conjugates its first argument
  const double boundary = -N * w * std::imag(dphi.dot(direction));

  VariationalCheck out;
  out.derivative = fd - boundary;

  const Field x1 = analytic_x1(phi, dphi, pair, v, N);
  const CVector ch_hbar = w * (pair.ch().entries * direction.conjugate());
  const CVector shb_h = w * (pair.sh().entries.conjugate() * direction);
  Complex pairing = 0.0;
  for (Index j = 0; j < x1.values.size(); ++j)
    pairing += x1.values(j) * (ch_hbar(j) - shb_h(j));
  out.pairing = 2.0 * std::sqrt(N) * w * pairing.real();

  out.relative_error = std::abs(out.derivative - out.pairing) /
                       std::max({std::abs(out.derivative), std::abs(out.pairing), 1e-300});
  return out;
}

namespace {

// vacuum-sector scalar of the variation generator: i*theta with
// i*theta = -(1/2) tr( Dch[h] o ch - conj(Dsh[h]) o sh )
double theta_scalar(const PairState& state, const CMatrix& direction) {
  const double w = state.grid()->weight;
  const PairPathDerivatives d = pair_path_derivatives(state, direction);
  const CMatrix ia = w * (d.dch * state.ch().entries -
                          d.dsh.conjugate() * state.sh().entries);
  const Complex tr = w * ia.trace();
  return std::imag(-0.5 * tr);
}

}  // namespace

VariationalCheck variational_check_zeta(const Field& phi, const CVector& dphi,
                                        const PairState& pair, const CMatrix& dzeta,
                                        const Potential& v, double N,
                                        const CMatrix& direction, double eps) {
  if (!(eps >= 1e-6 && eps <= 1e-3))
    throw ConfigError("variational_check_zeta: eps outside [1e-6, 1e-3]");
  const double w = phi.grid->weight;
  const GridPtr grid = phi.grid;

  PairState pp(Kernel{pair.zeta().entries + eps * direction, grid, SymmetryTag::symmetric});
  PairState pm(Kernel{pair.zeta().entries - eps * direction, grid, SymmetryTag::symmetric});
  const double xp = lagrangian_density_x0(phi, dphi, pp, dzeta, v, N);
  const double xm = lagrangian_density_x0(phi, dphi, pm, dzeta, v, N);
  const double fd = (xp - xm) / (2.0 * eps);

  // d/dt of the vacuum-sector scalar, by central difference along the flow
  const double tau = eps;
  PairState tp(Kernel{pair.zeta().entries + tau * dzeta, grid, SymmetryTag::symmetric});
  PairState tm(Kernel{pair.zeta().entries - tau * dzeta, grid, SymmetryTag::symmetric});
  const double theta_dot =
      (theta_scalar(tp, direction) - theta_scalar(tm, direction)) / (2.0 * tau);

  VariationalCheck out;
  out.derivative = fd - theta_dot;

  const Kernel x2 = analytic_x2(phi, dphi, pair, dzeta, v, N);
  const CMatrix& ch = pair.ch().entries;
  const CMatrix paired = w * w * (ch.conjugate() * x2.entries * ch);
  Complex acc = 0.0;
  for (Index c = 0; c < paired.cols(); ++c)
    for (Index r = 0; r < paired.rows(); ++r)
      acc += paired(r, c) * std::conj(direction(r, c));
  out.pairing = std::sqrt(2.0) * w * w * acc.real();

  out.relative_error = std::abs(out.derivative - out.pairing) /
                       std::max({std::abs(out.derivative), std::abs(out.pairing), 1e-300});
  return out;
}

DiagnosticsRecord diagnostics(const EvolutionState& s, const Potential& v) {
  PairState pair(s.zeta);
  HartreeKernels hk = build_hartree_kernels(s.phi, pair, v);
  Kernel theta = theta_kernel(s.phi, pair, v, v.N,
                              s.mode == EvolutionMode::coupled);
  const CVector dphi = rhs_phi(s.phi, pair, hk, theta, v, s.mode).values;
  const CMatrix dzeta = rhs_zeta(s.phi, pair, hk, theta, v, s.mode).entries;

  DiagnosticsRecord r;
  r.time = s.time;
  const MassBreakdown m = total_mass(s.phi, pair, v.N);
  r.mass_total = m.total;
  r.mass_condensate = m.condensate;
  r.mass_pair = m.pair_part;
  r.momentum = total_momentum(s.phi, pair, v.N);
  r.energy_total = total_energy(s.phi, pair, v, v.N).total;
  r.zeta_op_norm = pair.zeta_op_norm();
  r.x0 = lagrangian_density_x0(s.phi, dphi, pair, dzeta, v, v.N);
  return r;
}

std::string diagnostics_csv_header(int dim) {
  std::string h = "t,mass_total,mass_c,mass_p,px";
  if (dim > 1) h += ",py";
  if (dim > 2) h += ",pz";
  h += ",energy,zeta_norm,x0";
  return h;
}

std::string diagnostics_csv_row(const DiagnosticsRecord& r) {
  char buf[64];
  auto fmt = [&buf](double x) {
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
  };
  std::string row = fmt(r.time) + "," + fmt(r.mass_total) + "," +
                    fmt(r.mass_condensate) + "," + fmt(r.mass_pair);
  for (Index a = 0; a < r.momentum.size(); ++a) row += "," + fmt(r.momentum(a));
  row += "," + fmt(r.energy_total) + "," + fmt(r.zeta_op_norm) + "," + fmt(r.x0);
  return row;
}

}  // namespace pairex
