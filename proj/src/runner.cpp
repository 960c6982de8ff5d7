#include "pairex/runner.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>
#include <vector>

#include "pairex/conserved.hpp"
#include "pairex/fock.hpp"
#include "pairex/snapshot.hpp"

namespace pairex {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "'");
}

std::string snap_name(const char* stem, int index) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%06d.bin", stem, index);
  return buf;
}

Kernel random_symmetric_kernel(GridPtr grid, std::mt19937_64& rng, double target_norm) {
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

struct IdentityCheck {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass() const { return residual <= tolerance; }
};

struct SweepRow {
  double N = 0.0, beta = 0.0, t = 0.0;
  double fidelity_pair = 0.0, fidelity_mf = 0.0;
  double error_pair = 0.0, error_mf = 0.0;
};

struct OracleResult {
  double fidelity_pair = 0.0, fidelity_mf = 0.0;
  double tail = 0.0;
  int n_max = 0;
};

// evolve on the lattice and compare against the exact Fock evolution
OracleResult oracle_compare(const SimulationConfig& c, double N, double beta) {
  GridPtr grid = make_grid(c.dim, c.grid_points, c.box_length);
  Potential pot = config_potential(c, grid, N, beta);
  Field phi0 = build_initial_phi(c, grid);

  EvolveParams ep{c.dt, c.t_final, c.t_final > 0 ? c.t_final : 0.0};

  EvolutionState init{0.0, phi0, zero_kernel(grid, SymmetryTag::symmetric),
                      EvolutionMode::coupled};
  Trajectory pair_traj = evolve(init, pot, ep);
  init.mode = EvolutionMode::mean_field_only;
  Trajectory mf_traj = evolve(init, pot, ep);

  const int n_max = c.oracle_n_max_override > 0 ? c.oracle_n_max_override
                                                : default_n_max(N);
  FockSpacePtr space = build_space(grid, n_max);
  const SpMat h = fock_hamiltonian(*space, pot);

  FockVector exact = exact_evolve(coherent_state(space, phi0.values, N), c.t_final, h);

  const EvolutionState& pe = pair_traj.states.back();
  Kernel kt = k_from_zeta(pe.zeta);
  FockVector appr = approx_state(space, pe.phi.values, kt.entries, N);

  const EvolutionState& me = mf_traj.states.back();
  FockVector mf = coherent_state(space, me.phi.values, N);

  OracleResult r;
  r.n_max = n_max;
  r.fidelity_pair = fidelity(exact, appr);
  r.fidelity_mf = fidelity(exact, mf);
  r.tail = std::max({tail_mass(exact), tail_mass(appr), tail_mass(mf)});
  return r;
}

std::size_t pool_size() {
  if (const char* env = std::getenv("PAIREX_THREADS")) {
    const long n = std::atol(env);
    if (n >= 1) return static_cast<std::size_t>(n);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? hc : 1;
}

}  // namespace

void run_evolve(const SimulationConfig& c, const std::string& outdir) {
  ensure_dir(outdir);
  ensure_dir(outdir + "/snapshots");

  GridPtr grid = config_grid(c);
  Potential pot = config_potential(c, grid);
  Field phi0 = build_initial_phi(c, grid);
  EvolutionState init{0.0, phi0, zero_kernel(grid, SymmetryTag::symmetric), c.mode};

  EvolveParams ep{c.dt, c.t_final, c.output_interval};
  Trajectory traj;
  std::vector<DiagnosticsRecord> records;
  try {
    traj = evolve(init, pot, ep);
    for (const auto& s : traj.states) records.push_back(diagnostics(s, pot));
  } catch (const NumericalError& err) {
    // flush whatever was recorded before propagating
    std::ofstream os(outdir + "/diagnostics.csv");
    os << diagnostics_csv_header(c.dim) << "\n";
    for (const auto& r : records) os << diagnostics_csv_row(r) << "\n";
    throw;
  }

  std::ofstream os(outdir + "/diagnostics.csv");
  if (!os) throw ConfigError("cannot write diagnostics.csv in '" + outdir + "'");
  os << diagnostics_csv_header(c.dim) << "\n";
  for (const auto& r : records) os << diagnostics_csv_row(r) << "\n";

  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const auto& s = traj.states[i];
    write_kernel_snapshot(outdir + "/snapshots/" + snap_name("zeta", int(i)), s.zeta,
                          SnapshotKind::zeta);
    write_field_snapshot(outdir + "/snapshots/" + snap_name("phi", int(i)), s.phi);
  }
}

void run_oracle(const SimulationConfig& c, const std::string& outdir) {
  if (c.grid_points != c.oracle_sites)
    throw ConfigError("oracle: grid_points must equal oracle_sites");
  if (c.dim != 1) throw ConfigError("oracle: only dim = 1 lattices are supported");
  ensure_dir(outdir);

  GridPtr grid = config_grid(c);
  Potential pot = config_potential(c, grid);
  Field phi0 = build_initial_phi(c, grid);

  EvolveParams ep{c.dt, c.t_final, c.t_final > 0 ? c.t_final : 0.0};
  EvolutionState init{0.0, phi0, zero_kernel(grid, SymmetryTag::symmetric), c.mode};
  Trajectory traj = evolve(init, pot, ep);
  const EvolutionState& end = traj.states.back();

  const int n_max = c.oracle_n_max_override > 0 ? c.oracle_n_max_override
                                                : default_n_max(c.N);
  FockSpacePtr space = build_space(grid, n_max);
  const SpMat h = fock_hamiltonian(*space, pot);

  FockVector exact = exact_evolve(coherent_state(space, phi0.values, c.N), c.t_final, h);
  PairState pair(end.zeta);
  Kernel kt = k_from_zeta(end.zeta);
  FockVector appr = approx_state(space, end.phi.values, kt.entries, c.N);

  const double fid = fidelity(exact, appr);
  const double tail = std::max(tail_mass(exact), tail_mass(appr));

  // reduced-Hamiltonian components with dynamics-consistent time derivatives
  StateDerivative der = evaluate_rhs(end, pot);
  PairPathDerivatives pd = pair_path_derivatives(pair, der.dzeta);
  HredComponents hred = numeric_hred_vacuum(space, end.phi.values, der.dphi, kt.entries,
                                            pd.dk, c.N, pot);

  const double w = grid->weight;
  json j;
  j["M"] = c.oracle_sites;
  j["n_max"] = n_max;
  j["N"] = c.N;
  j["beta"] = c.beta;
  j["t"] = c.t_final;
  j["fidelity"] = fid;
  j["error"] = std::sqrt(std::max(0.0, 2.0 - 2.0 * fid));
  j["tail_mass"] = tail;
  j["hred_tail_mass"] = hred.tail;
  j["x_norms"] = {{"x0", std::abs(hred.x0)},
                  {"x1", std::sqrt(w) * hred.x1.norm()},
                  {"x2", w * hred.x2.norm()},
                  {"x3", hred.x3_norm},
                  {"x4", hred.x4_norm}};
  if (tail > 1e-8) j["warning"] = "truncation tail above 1e-8";

  std::ofstream os(outdir + "/oracle.json");
  if (!os) throw ConfigError("cannot write oracle.json in '" + outdir + "'");
  os << j.dump(2) << "\n";
}

void run_identities(const SimulationConfig& c, const std::string& outdir) {
  ensure_dir(outdir);
  GridPtr grid = config_grid(c);
  const double w = grid->weight;
  std::mt19937_64 rng(c.seed);

  std::vector<IdentityCheck> checks;
  auto record = [&checks](const std::string& name, double res, double tol) {
    checks.push_back({name, res, tol});
  };

  const Kernel id = identity_kernel(grid);
  double r_group = 0, r_commute = 0, r_unn = 0, r_symp = 0, r_sigma = 0;
  double r_ez = 0, r_expk = 0, r_round = 0, r_doubled = 0, r_chinv = 0;
  double r_takagi = 0, r_svd = 0;

  const int kernels = 50;
  for (int i = 0; i < kernels; ++i) {
    const double target = 0.2 + 1.0 * double(i) / double(kernels - 1);
    Kernel k = random_symmetric_kernel(grid, rng, target);

    ShChPair sc = sh_ch_from_k(k);
    const Kernel chch = compose(sc.ch, sc.ch);
    const Kernel shbsh = compose(kconj(sc.sh), sc.sh);
    r_group = std::max(r_group,
                       w * (chch.entries - shbsh.entries - id.entries).norm());
    r_commute = std::max(
        r_commute, w * (compose(sc.ch, kconj(sc.sh)).entries -
                        compose(kconj(sc.sh), kconj(sc.ch)).entries).norm());

    BogoliubovMatrix ek = bogoliubov_from_k(k);
    GroupResiduals gr = check_group_properties(ek);
    r_sigma = std::max(r_sigma, gr.sigma_reality);
    r_unn = std::max(r_unn, gr.unn);
    r_symp = std::max(r_symp, gr.symplectic);

    Kernel zeta = zeta_from_k(k);
    BogoliubovMatrix ez = bogoliubov_from_zeta(zeta);
    r_ez = std::max(r_ez, bogoliubov_block_distance(ek, ez));
    BogoliubovMatrix ex = bogoliubov_exponential(k);
    r_expk = std::max(r_expk, bogoliubov_block_distance(ek, ex));

    Kernel back = k_from_zeta(zeta);
    r_round = std::max(r_round, w * (back.entries - k.entries).norm());

    PairState ps(zeta);
    const CMatrix lhs = w * (zeta.entries * (id.entries + ps.ch2k().entries));
    r_doubled = std::max(r_doubled, w * (lhs - ps.sh2k().entries).norm());
    ShChPair sc2 = sh_ch_from_k(Kernel{2.0 * k.entries, grid, SymmetryTag::symmetric});
    r_doubled = std::max(r_doubled, w * (sc2.sh.entries - ps.sh2k().entries).norm());
    r_doubled = std::max(r_doubled, w * (sc2.ch.entries - ps.ch2k().entries).norm());

    // I - ch^{-2} = conj(zeta) o zeta
    const CMatrix chw = w * ps.ch().entries;
    const CMatrix inv2 = (chw * chw).inverse();
    const CMatrix zz = (w * zeta.entries).conjugate() * (w * zeta.entries);
    r_chinv = std::max(r_chinv,
                       (CMatrix::Identity(grid->total_points, grid->total_points) -
                        inv2 - zz).norm());

    TakagiFactorization tk = takagi(k);
    r_takagi = std::max(
        r_takagi, (tk.u * tk.sigma.asDiagonal() * tk.u.transpose() - w * k.entries).norm());
    Eigen::JacobiSVD<CMatrix> svd(w * k.entries);
    r_svd = std::max(r_svd, (svd.singularValues() - tk.sigma).cwiseAbs().maxCoeff());
  }

  record("group_inverse_chch_shbsh", r_group, 1e-9);
  record("group_commute_ch_shb", r_commute, 1e-9);
  record("remark_e_sigma_reality", r_sigma, 1e-10);
  record("remark_e_unn", r_unn, 1e-9);
  record("remark_e_symplectic", r_symp, 1e-9);
  record("e_zeta_equals_exp_k", r_ez, 1e-9);
  record("dense_exponential_equals_exp_k", r_expk, 1e-9);
  record("zeta_k_round_trip", r_round, 1e-9);
  record("doubled_kernel_identities", r_doubled, 1e-9);
  record("ch_inverse_square_identity", r_chinv, 1e-9);
  record("takagi_reconstruction", r_takagi, 1e-10);
  record("takagi_sigma_vs_svd", r_svd, 1e-12);

  // series oracle: 12-term composition series for small kernels
  double r_series = 0, r_rank1 = 0;
  for (int i = 0; i < 20; ++i) {
    const double target = 0.05 + 0.45 * double(i) / 19.0;
    Kernel k = random_symmetric_kernel(grid, rng, target);
    const CMatrix kw = w * k.entries;
    CMatrix sh_series = kw;
    CMatrix term = kw;
    CMatrix ch_series = CMatrix::Identity(kw.rows(), kw.cols());
    CMatrix even = ch_series;
    for (int m = 1; m <= 12; ++m) {
      even = (even * kw.conjugate() * kw / (2.0 * m - 1.0) / (2.0 * m)).eval();
      ch_series += even;
      term = (term * kw.conjugate() * kw / (2.0 * m) / (2.0 * m + 1.0)).eval();
      sh_series += term;
    }
    ShChPair sc = sh_ch_from_k(k);
    r_series = std::max(r_series, (w * sc.sh.entries - sh_series).norm());
    r_series = std::max(r_series, (w * sc.ch.entries - ch_series).norm());
  }
  {
    std::normal_distribution<double> gauss(0.0, 1.0);
    RVector u(grid->total_points);
    for (Index j = 0; j < u.size(); ++j) u(j) = gauss(rng);
    u /= std::sqrt(w) * u.norm();  // unit L2 norm, real
    const double lambda = 0.7;
    CMatrix kv = lambda * (u * u.transpose()).cast<Complex>();
    Kernel k{kv, grid, SymmetryTag::symmetric};
    ShChPair sc = sh_ch_from_k(k);
    const CMatrix sh_exact = std::sinh(lambda) * (u * u.transpose()).cast<Complex>();
    const CMatrix ch_exact =
        CMatrix::Identity(u.size(), u.size()) / w +
        (std::cosh(lambda) - 1.0) * (u * u.transpose()).cast<Complex>();
    r_rank1 = std::max(w * (sc.sh.entries - sh_exact).norm(),
                       w * (sc.ch.entries - ch_exact).norm());
  }
  record("series_vs_spectral", r_series, 1e-12);
  record("rank_one_closed_form", r_rank1, 1e-12);

  // chart guard must reject |zeta|_op >= 1 - 1e-6
  {
    RVector u = RVector::Ones(grid->total_points);
    u /= std::sqrt(w) * u.norm();
    CMatrix zv = (1.0 - 5e-7) * (u * u.transpose()).cast<Complex>();
    bool rejected = false;
    try {
      k_from_zeta(Kernel{zv, grid, SymmetryTag::symmetric});
    } catch (const NumericalError&) {
      rejected = true;
    }
    record("chart_guard_rejection", rejected ? 0.0 : 1.0, 0.5);
  }

  bool all_pass = true;
  json arr = json::array();
  for (const auto& ch : checks) {
    arr.push_back({{"name", ch.name},
                   {"residual", ch.residual},
                   {"tolerance", ch.tolerance},
                   {"pass", ch.pass()}});
    all_pass = all_pass && ch.pass();
  }
  json j;
  j["seed"] = c.seed;
  j["grid_points"] = c.grid_points;
  j["dim"] = c.dim;
  j["checks"] = arr;
  j["all_pass"] = all_pass;

  std::ofstream os(outdir + "/identities.json");
  if (!os) throw ConfigError("cannot write identities.json in '" + outdir + "'");
  os << j.dump(2) << "\n";

  if (!all_pass) throw ToleranceError("identity suite failed; see identities.json");
}

void run_sweep(const SimulationConfig& c, const std::string& outdir) {
  if (c.grid_points != c.oracle_sites)
    throw ConfigError("sweep: grid_points must equal oracle_sites");
  if (c.dim != 1) throw ConfigError("sweep: only dim = 1 lattices are supported");
  ensure_dir(outdir);

  std::vector<double> ns = c.sweep_N.empty() ? std::vector<double>{c.N} : c.sweep_N;
  std::vector<double> betas =
      c.sweep_beta.empty() ? std::vector<double>{c.beta} : c.sweep_beta;

  struct Point {
    double N, beta;
  };
  std::vector<Point> points;
  for (double n : ns)
    for (double b : betas) points.push_back({n, b});

  std::vector<SweepRow> rows(points.size());
  std::vector<std::string> errors(points.size());
  std::atomic<std::size_t> next{0};

  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      try {
        OracleResult r = oracle_compare(c, points[i].N, points[i].beta);
        SweepRow row;
        row.N = points[i].N;
        row.beta = points[i].beta;
        row.t = c.t_final;
        row.fidelity_pair = r.fidelity_pair;
        row.fidelity_mf = r.fidelity_mf;
        row.error_pair = std::sqrt(std::max(0.0, 2.0 - 2.0 * r.fidelity_pair));
        row.error_mf = std::sqrt(std::max(0.0, 2.0 - 2.0 * r.fidelity_mf));
        rows[i] = row;
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };

  const std::size_t nthreads = std::min(pool_size(), points.size());
  std::vector<std::thread> workers;
  for (std::size_t t = 0; t + 1 < nthreads; ++t) workers.emplace_back(work);
  work();
  for (auto& t : workers) t.join();

  for (std::size_t i = 0; i < points.size(); ++i)
    if (!errors[i].empty())
      throw NumericalError("sweep point (N=" + std::to_string(points[i].N) +
                           ", beta=" + std::to_string(points[i].beta) +
                           ") failed: " + errors[i]);

  std::ofstream os(outdir + "/sweep.csv");
  if (!os) throw ConfigError("cannot write sweep.csv in '" + outdir + "'");
  os << "N,beta,t,fidelity_pair,fidelity_meanfield,error_pair,error_meanfield\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.N,
                  r.beta, r.t, r.fidelity_pair, r.fidelity_mf, r.error_pair, r.error_mf);
    os << buf;
  }
}

}  // namespace pairex
