#include "pairex/fock.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace pairex {

namespace {

using Triplet = Eigen::Triplet<Complex>;

void enumerate_occupations(int sites, int remaining, std::vector<std::uint8_t>& cur,
                           std::vector<std::vector<std::uint8_t>>& out) {
  const int site = static_cast<int>(cur.size());
  if (site == sites - 1) {
    cur.push_back(static_cast<std::uint8_t>(remaining));
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int n = remaining; n >= 0; --n) {
    cur.push_back(static_cast<std::uint8_t>(n));
    enumerate_occupations(sites, remaining - n, cur, out);
    cur.pop_back();
  }
}

// monomial of ladder operators, applied right to left
struct LadderFactor {
  int site;
  bool create;
};

// accumulate coeff * (product of factors) applied to every basis state
void add_monomial(const FockSpace& s, Complex coeff,
                  const std::vector<LadderFactor>& factors,
                  std::vector<Triplet>& out) {
  if (coeff == Complex(0.0, 0.0)) return;
  std::vector<std::uint8_t> occ;
  for (Index col = 0; col < s.dim; ++col) {
    occ = s.basis[col];
    double amp = 1.0;
    bool dead = false;
    for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
      if (it->create) {
        amp *= std::sqrt(double(occ[it->site]) + 1.0);
        occ[it->site] += 1;
      } else {
        if (occ[it->site] == 0) {
          dead = true;
          break;
        }
        amp *= std::sqrt(double(occ[it->site]));
        occ[it->site] -= 1;
      }
    }
    if (dead) continue;
    const Index row = s.find(occ);
    if (row < 0) continue;  // truncated away
    out.emplace_back(row, col, coeff * amp);
  }
}

SpMat from_triplets(const FockSpace& s, std::vector<Triplet>& t) {
  SpMat m(s.dim, s.dim);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

std::uint64_t FockSpace::encode(const std::vector<std::uint8_t>& occ) {
  std::uint64_t key = 0;
  for (std::size_t j = 0; j < occ.size(); ++j)
    key |= std::uint64_t(occ[j]) << (8 * j);
  return key;
}

Index FockSpace::find(const std::vector<std::uint8_t>& occ) const {
  auto it = lookup.find(encode(occ));
  return it == lookup.end() ? Index{-1} : it->second;
}

int FockSpace::total_number(Index i) const {
  int t = 0;
  for (auto n : basis[i]) t += n;
  return t;
}

int default_n_max(double N) {
  return static_cast<int>(std::ceil(N + 6.0 * std::sqrt(N))) + 4;
}

FockSpacePtr build_space(GridPtr grid, int n_max) {
  const int sites = static_cast<int>(grid->total_points);
  if (sites < 2) throw ConfigError("build_space: need at least 2 sites");
  if (sites > 8) throw ConfigError("build_space: more than 8 sites not supported");
  if (n_max < 1) throw ConfigError("build_space: n_max must be >= 1");

  auto s = std::make_shared<FockSpace>();
  s->grid = grid;
  s->sites = sites;
  s->n_max = n_max;
  s->weight = grid->weight;

  s->sector_begin.assign(n_max + 2, 0);
  std::vector<std::uint8_t> cur;
  for (int n = 0; n <= n_max; ++n) {
    s->sector_begin[n] = static_cast<Index>(s->basis.size());
    enumerate_occupations(sites, n, cur, s->basis);
  }
  s->sector_begin[n_max + 1] = static_cast<Index>(s->basis.size());
  s->dim = static_cast<Index>(s->basis.size());
  if (s->dim > 5'000'000) throw ConfigError("build_space: truncated dimension exceeds 5e6");

  s->lookup.reserve(2 * s->basis.size());
  for (Index i = 0; i < s->dim; ++i) s->lookup.emplace(FockSpace::encode(s->basis[i]), i);
  return s;
}

FockVector vacuum(FockSpacePtr space) {
  CVector c = CVector::Zero(space->dim);
  c(0) = 1.0;
  return FockVector{std::move(c), std::move(space)};
}

double fock_norm(const FockVector& v) { return v.coeffs.norm(); }

Complex overlap(const FockVector& a, const FockVector& b) {
  if (a.space != b.space) throw NumericalError("overlap: different Fock spaces");
  return a.coeffs.dot(b.coeffs);
}

double fidelity(const FockVector& a, const FockVector& b) {
  const double na = fock_norm(a), nb = fock_norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::abs(overlap(a, b)) / (na * nb);
}

double tail_mass(const FockVector& v, int sectors) {
  const FockSpace& s = *v.space;
  const int lo = std::max(0, s.n_max + 1 - sectors);
  const Index begin = s.sector_begin[lo];
  const double total = v.coeffs.squaredNorm();
  if (total == 0.0) return 0.0;
  return v.coeffs.tail(s.dim - begin).squaredNorm() / total;
}

std::pair<SpMat, SpMat> ladder(const FockSpace& s, int site) {
  std::vector<Triplet> ta, tc;
  add_monomial(s, 1.0, {{site, false}}, ta);
  add_monomial(s, 1.0, {{site, true}}, tc);
  return {from_triplets(s, ta), from_triplets(s, tc)};
}

SpMat number_operator(const FockSpace& s) {
  std::vector<Triplet> t;
  for (Index i = 0; i < s.dim; ++i)
    t.emplace_back(i, i, Complex(double(s.total_number(i)), 0.0));
  return from_triplets(s, t);
}

SpMat weyl_generator(const FockSpace& s, const CVector& phi) {
  if (phi.size() != s.sites) throw ConfigError("weyl_generator: field size mismatch");
  const double rw = std::sqrt(s.weight);
  std::vector<Triplet> t;
  for (int j = 0; j < s.sites; ++j) {
    add_monomial(s, rw * std::conj(phi(j)), {{j, false}}, t);
    add_monomial(s, -rw * phi(j), {{j, true}}, t);
  }
  return from_triplets(s, t);
}

SpMat squeeze_generator(const FockSpace& s, const CMatrix& k) {
  if (k.rows() != s.sites || k.cols() != s.sites)
    throw ConfigError("squeeze_generator: kernel size mismatch");
  const double w = s.weight;
  std::vector<Triplet> t;
  for (int j = 0; j < s.sites; ++j) {
    for (int l = 0; l < s.sites; ++l) {
      add_monomial(s, 0.5 * w * std::conj(k(j, l)), {{j, false}, {l, false}}, t);
      add_monomial(s, -0.5 * w * k(j, l), {{j, true}, {l, true}}, t);
    }
  }
  return from_triplets(s, t);
}

SpMat quadratic_rep(const FockSpace& s, const CMatrix& d, const CMatrix& k,
                    const CMatrix& l) {
  const double w = s.weight;
  std::vector<Triplet> t;
  for (int x = 0; x < s.sites; ++x) {
    for (int y = 0; y < s.sites; ++y) {
      // -(1/2) int d(x,y) a_x adag_y + d(y,x) adag_x a_y + k adag adag - l a a
      add_monomial(s, -0.5 * w * d(x, y), {{x, false}, {y, true}}, t);
      add_monomial(s, -0.5 * w * d(y, x), {{x, true}, {y, false}}, t);
      add_monomial(s, -0.5 * w * k(x, y), {{x, true}, {y, true}}, t);
      add_monomial(s, 0.5 * w * l(x, y), {{x, false}, {y, false}}, t);
    }
  }
  return from_triplets(s, t);
}

SpMat fock_hamiltonian(const FockSpace& s, const Potential& v) {
  require_same_grid(s.grid, v.grid, "fock_hamiltonian");
  const RMatrix& lap = s.grid->laplacian;
  std::vector<Triplet> t;
  for (int j = 0; j < s.sites; ++j)
    for (int l = 0; l < s.sites; ++l)
      add_monomial(s, Complex(lap(j, l), 0.0), {{j, true}, {l, false}}, t);
  // pair interaction is diagonal in the occupation basis:
  // (1/2) sum v(x_j - x_l) (n_j n_l - delta_jl n_j)
  for (Index i = 0; i < s.dim; ++i) {
    double val = 0.0;
    const auto& occ = s.basis[i];
    for (int j = 0; j < s.sites; ++j) {
      if (occ[j] == 0) continue;
      for (int l = 0; l < s.sites; ++l) {
        const double njl = double(occ[j]) * (j == l ? double(occ[j]) - 1.0 : double(occ[l]));
        val += 0.5 * v.difference(j, l) * njl;
      }
    }
    t.emplace_back(i, i, Complex(-val / v.N, 0.0));
  }
  return from_triplets(s, t);
}

SpMat cubic_term(const FockSpace& s, const CVector& phi, const Potential& v) {
  const double rw = std::sqrt(s.weight);
  std::vector<Triplet> t;
  for (int x = 0; x < s.sites; ++x) {
    for (int y = 0; y < s.sites; ++y) {
      const double vxy = v.difference(x, y);
      if (vxy == 0.0) continue;
      add_monomial(s, rw * vxy * phi(y), {{x, true}, {y, true}, {x, false}}, t);
      add_monomial(s, rw * vxy * std::conj(phi(y)), {{x, true}, {x, false}, {y, false}}, t);
    }
  }
  return from_triplets(s, t);
}

CVector expmv(const SpMat& a, const CVector& v, Complex t, double tol, int krylov_dim) {
  const Index n = v.size();
  const double beta0 = v.norm();
  if (beta0 == 0.0 || t == Complex(0.0, 0.0)) return v;

  CVector w = v;
  double remaining = 1.0;
  int guard = 0;
  while (remaining > 0.0) {
    if (++guard > 100000) throw NumericalError("expmv: did not converge");
    const double beta = w.norm();
    if (beta == 0.0) return w;

    const int m = static_cast<int>(std::min<Index>(krylov_dim, n));
    CMatrix vbasis = CMatrix::Zero(n, m);
    CMatrix h = CMatrix::Zero(m + 1, m);
    vbasis.col(0) = w / beta;
    int built = m;
    bool breakdown = false;
    for (int j = 0; j < m; ++j) {
      CVector cand = a * vbasis.col(j);
      for (int i = 0; i <= j; ++i) {
        const Complex hij = vbasis.col(i).dot(cand);
        h(i, j) = hij;
        cand -= hij * vbasis.col(i);
      }
      // one re-orthogonalization pass keeps the basis clean
      for (int i = 0; i <= j; ++i) {
        const Complex corr = vbasis.col(i).dot(cand);
        h(i, j) += corr;
        cand -= corr * vbasis.col(i);
      }
      const double hn = cand.norm();
      h(j + 1, j) = hn;
      if (hn < 1e-14 * std::max(1.0, h.norm())) {
        built = j + 1;
        breakdown = true;
        break;
      }
      if (j + 1 < m) vbasis.col(j + 1) = cand / hn;
    }

    const CMatrix hm = h.topLeftCorner(built, built);
    const double hnorm = hm.cwiseAbs().maxCoeff() * std::abs(t);
    double tau = breakdown ? remaining
                           : std::min(remaining, 1.5 * built / std::max(hnorm, 1e-30));
    for (;;) {
      const CMatrix e = (tau * t * hm).exp();
      const double err =
          breakdown ? 0.0
                    : beta * std::abs(h(built, built - 1)) * std::abs(e(built - 1, 0));
      if (breakdown || err <= tol * std::max(beta0, 1e-300) * tau || tau < 1e-12) {
        w = beta * (vbasis.leftCols(built) * e.col(0));
        remaining -= tau;
        break;
      }
      tau *= 0.5;
    }
  }
  return w;
}

FockVector coherent_state(FockSpacePtr space, const CVector& phi, double N) {
  const SpMat gen = weyl_generator(*space, phi);
  FockVector v = vacuum(space);
  v.coeffs = expmv(gen, v.coeffs, Complex(-std::sqrt(N), 0.0), 1e-13);
  return v;
}

FockVector approx_state(FockSpacePtr space, const CVector& phi, const CMatrix& k,
                        double N) {
  FockVector v = vacuum(space);
  const SpMat b = squeeze_generator(*space, k);
  v.coeffs = expmv(b, v.coeffs, Complex(-1.0, 0.0), 1e-13);
  const SpMat a = weyl_generator(*space, phi);
  v.coeffs = expmv(a, v.coeffs, Complex(-std::sqrt(N), 0.0), 1e-13);
  return v;
}

FockVector exact_evolve(const FockVector& psi0, double t, const SpMat& h, double tol) {
  FockVector out = psi0;
  if (t != 0.0) out.coeffs = expmv(h, psi0.coeffs, Complex(0.0, t), tol);
  return out;
}

Complex sector0(const FockVector& v) { return v.coeffs(0); }

CVector sector1_function(const FockVector& v) {
  const FockSpace& s = *v.space;
  const double rw = std::sqrt(s.weight);
  CVector f = CVector::Zero(s.sites);
  for (Index i = s.sector_begin[1]; i < s.sector_begin[2]; ++i) {
    const auto& occ = s.basis[i];
    for (int j = 0; j < s.sites; ++j)
      if (occ[j] == 1) f(j) = v.coeffs(i) / rw;
  }
  return f;
}

CMatrix sector2_function(const FockVector& v) {
  const FockSpace& s = *v.space;
  const double w = s.weight;
  CMatrix f = CMatrix::Zero(s.sites, s.sites);
  if (s.n_max < 2) return f;
  for (Index i = s.sector_begin[2]; i < s.sector_begin[3]; ++i) {
    const auto& occ = s.basis[i];
    int j1 = -1, j2 = -1;
    for (int j = 0; j < s.sites; ++j) {
      if (occ[j] == 2) j1 = j2 = j;
      if (occ[j] == 1) (j1 < 0 ? j1 : j2) = j;
    }
    if (j1 == j2) {
      f(j1, j1) = v.coeffs(i) / w;
    } else {
      const Complex val = v.coeffs(i) / (std::sqrt(2.0) * w);
      f(j1, j2) = val;
      f(j2, j1) = val;
    }
  }
  return f;
}

double sector_norm(const FockVector& v, int n) {
  const FockSpace& s = *v.space;
  if (n > s.n_max) return 0.0;
  return v.coeffs.segment(s.sector_begin[n], s.sector_begin[n + 1] - s.sector_begin[n])
      .norm();
}

HredComponents numeric_hred_vacuum(FockSpacePtr space, const CVector& phi,
                                   const CVector& dphi, const CMatrix& k,
                                   const CMatrix& dk, double N, const Potential& v,
                                   double eps_t) {
  if (!(eps_t >= 1e-6 && eps_t <= 1e-4))
    throw ConfigError("numeric_hred_vacuum: eps_t outside [1e-6, 1e-4]");
  const FockSpace& s = *space;
  const double rn = std::sqrt(N);
  const double tol = 1e-13;

  const SpMat b0 = squeeze_generator(s, k);
  const SpMat bp = squeeze_generator(s, k + eps_t * dk);
  const SpMat bm = squeeze_generator(s, k - eps_t * dk);
  const SpMat a0 = weyl_generator(s, phi);
  const SpMat ap = weyl_generator(s, phi + eps_t * dphi);
  const SpMat am = weyl_generator(s, phi - eps_t * dphi);
  const SpMat h = fock_hamiltonian(s, v);

  CVector vac = CVector::Zero(s.dim);
  vac(0) = 1.0;

  const CVector v0 = expmv(b0, vac, Complex(-1.0, 0.0), tol);
  const CVector w0 = expmv(a0, v0, Complex(-rn, 0.0), tol);

  // (1/i)(d/dt e^{sqrt(N) A}) e^{-sqrt(N) A} acting through w0
  const CVector z1 = (expmv(ap, w0, Complex(rn, 0.0), tol) -
                      expmv(am, w0, Complex(rn, 0.0), tol)) /
                     (2.0 * eps_t * I1);
  const CVector z2 = expmv(a0, CVector(h * w0), Complex(rn, 0.0), tol);
  const CVector y = z1 + z2;

  CVector r = (expmv(bp, v0, Complex(1.0, 0.0), tol) -
               expmv(bm, v0, Complex(1.0, 0.0), tol)) /
              (2.0 * eps_t * I1);
  r += expmv(b0, y, Complex(1.0, 0.0), tol);

  FockVector result{r, space};
  HredComponents out;
  out.x0 = sector0(result);
  out.x1 = sector1_function(result);
  out.x2 = sector2_function(result);
  out.x3_norm = sector_norm(result, 3);
  out.x4_norm = sector_norm(result, 4);
  out.tail = std::max({tail_mass(FockVector{v0, space}), tail_mass(FockVector{w0, space}),
                       tail_mass(FockVector{y, space})});
  return out;
}

}  // namespace pairex
