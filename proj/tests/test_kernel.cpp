#include <doctest.h>

#include <random>

#include "oracles.hpp"

using namespace pairex;

namespace {

GridPtr grid16() {
  static GridPtr g = make_grid(1, 16, 2.0 * M_PI);
  return g;
}

Kernel rank_one(GridPtr g, double lambda, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  RVector u(g->total_points);
  for (Index j = 0; j < u.size(); ++j) u(j) = gauss(rng);
  u /= std::sqrt(g->weight) * u.norm();
  return Kernel{lambda * (u * u.transpose()).cast<Complex>(), g, SymmetryTag::symmetric};
}

}  // namespace

TEST_CASE("composition against the naive loop and the identity kernel") {
  auto g = grid16();
  std::mt19937_64 rng(11);
  Kernel a = testing::random_symmetric(g, rng, 1.0);
  Kernel b = testing::random_symmetric(g, rng, 0.7);

  const CMatrix ref = testing::naive_compose(*g, a.entries, b.entries);
  CHECK((compose(a, b).entries - ref).norm() < 1e-13 * ref.norm());

  Kernel id = identity_kernel(g);
  CHECK((compose(id, a).entries - a.entries).norm() < 1e-12 * a.entries.norm());
  CHECK((compose(a, id).entries - a.entries).norm() < 1e-12 * a.entries.norm());

  // rank-one projection composes to itself
  Kernel p = rank_one(g, 1.0, rng);
  CHECK((compose(p, p).entries - p.entries).norm() < 1e-12);
}

TEST_CASE("takagi factorization") {
  auto g = grid16();
  std::mt19937_64 rng(5);
  const double w = g->weight;

  SUBCASE("zero kernel") {
    TakagiFactorization tk = takagi(zero_kernel(g, SymmetryTag::symmetric));
    CHECK(tk.sigma.maxCoeff() == 0.0);
  }

  SUBCASE("rank one") {
    Kernel k = rank_one(g, 0.8, rng);
    TakagiFactorization tk = takagi(k);
    CHECK(tk.sigma(0) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(tk.sigma(1) < 1e-12);
  }

  SUBCASE("random symmetric: reconstruction and SVD cross-check") {
    for (int trial = 0; trial < 10; ++trial) {
      Kernel k = testing::random_symmetric(g, rng, 0.4 + 0.2 * trial);
      TakagiFactorization tk = takagi(k);
      const CMatrix kw = w * k.entries;
      CHECK((tk.u * tk.sigma.asDiagonal() * tk.u.transpose() - kw).norm() <=
            1e-10 * kw.norm());
      CHECK((tk.u.adjoint() * tk.u - CMatrix::Identity(kw.rows(), kw.cols())).norm() <
            1e-12);
      Eigen::JacobiSVD<CMatrix> svd(kw);
      CHECK((svd.singularValues() - tk.sigma).cwiseAbs().maxCoeff() < 1e-12);
      for (Index j = 1; j < tk.sigma.size(); ++j) CHECK(tk.sigma(j - 1) >= tk.sigma(j));
    }
  }

  SUBCASE("exactly degenerate singular values from a plane-wave pair") {
    // k(x,y) = cos(xi (x - y)) has doubly degenerate singular values
    const Index n = g->total_points;
    CMatrix kv(n, n);
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < n; ++c)
        kv(r, c) = std::cos(2.0 * (g->coordinate[0](r) - g->coordinate[0](c)));
    Kernel k{kv, g, SymmetryTag::symmetric};
    TakagiFactorization tk = takagi(k);
    const CMatrix kw = w * k.entries;
    CHECK((tk.u * tk.sigma.asDiagonal() * tk.u.transpose() - kw).norm() <=
          1e-10 * kw.norm());
    CHECK(tk.sigma(0) == doctest::Approx(tk.sigma(1)).epsilon(1e-12));
  }

  SUBCASE("non-symmetric input is rejected") {
    CMatrix m = CMatrix::Random(g->total_points, g->total_points);
    m(0, 1) += 1.0;
    CHECK_THROWS_AS(takagi(Kernel{m, g, SymmetryTag::general}), NumericalError);
  }
}

TEST_CASE("operator norm by power iteration") {
  auto g = grid16();
  std::mt19937_64 rng(17);
  Kernel k = testing::random_symmetric(g, rng, 1.0);
  Eigen::JacobiSVD<CMatrix> svd(g->weight * k.entries);
  CHECK(operator_norm(k) == doctest::Approx(svd.singularValues()(0)).epsilon(1e-8));
  CHECK(operator_norm(zero_kernel(g)) == 0.0);
}

TEST_CASE("sh and ch from k") {
  auto g = grid16();
  std::mt19937_64 rng(23);

  SUBCASE("k = 0") {
    ShChPair sc = sh_ch_from_k(zero_kernel(g, SymmetryTag::symmetric));
    CHECK(sc.sh.entries.norm() == 0.0);
    CHECK((sc.ch.entries - identity_kernel(g).entries).norm() < 1e-12);
  }

  SUBCASE("rank-one closed form") {
    const double lambda = 1.3;
    Kernel k = rank_one(g, lambda, rng);
    ShChPair sc = sh_ch_from_k(k);
    const CMatrix proj = k.entries / lambda;
    CHECK(g->weight * (sc.sh.entries - std::sinh(lambda) * proj).norm() < 1e-12);
    const CMatrix ch_exact = identity_kernel(g).entries + (std::cosh(lambda) - 1.0) * proj;
    CHECK(g->weight * (sc.ch.entries - ch_exact).norm() < 1e-12);
  }

  SUBCASE("series oracle for small norms") {
    for (double target : {0.1, 0.3, 0.5}) {
      Kernel k = testing::random_symmetric(g, rng, target);
      auto [sh_s, ch_s] = testing::series_sh_ch(*g, k.entries);
      ShChPair sc = sh_ch_from_k(k);
      CHECK(g->weight * (sc.sh.entries - sh_s).norm() < 1e-12);
      CHECK(g->weight * (sc.ch.entries - ch_s).norm() < 1e-12);
    }
  }

  SUBCASE("ch spectrum at least one and group identity") {
    Kernel k = testing::random_symmetric(g, rng, 1.4);
    ShChPair sc = sh_ch_from_k(k);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(g->weight * sc.ch.entries);
    CHECK(es.eigenvalues().minCoeff() >= 1.0 - 1e-12);
    Kernel id = identity_kernel(g);
    const CMatrix lhs = compose(sc.ch, sc.ch).entries -
                        compose(kconj(sc.sh), sc.sh).entries;
    CHECK(g->weight * (lhs - id.entries).norm() < 1e-10);
    const CMatrix comm = compose(sc.ch, kconj(sc.sh)).entries -
                         compose(kconj(sc.sh), kconj(sc.ch)).entries;
    CHECK(g->weight * comm.norm() < 1e-10);
  }
}

TEST_CASE("zeta <-> k bijection") {
  auto g = grid16();
  std::mt19937_64 rng(31);

  SUBCASE("zero and rank one") {
    CHECK(zeta_from_k(zero_kernel(g, SymmetryTag::symmetric)).entries.norm() == 0.0);
    const double lambda = 0.9;
    Kernel k = rank_one(g, lambda, rng);
    Kernel z = zeta_from_k(k);
    CHECK(g->weight * (z.entries - std::tanh(lambda) / lambda * k.entries).norm() < 1e-12);
  }

  SUBCASE("round trip") {
    for (double target : {0.2, 0.8, 1.6}) {
      Kernel k = testing::random_symmetric(g, rng, target);
      Kernel back = k_from_zeta(zeta_from_k(k));
      CHECK(g->weight * (back.entries - k.entries).norm() < 1e-10);
    }
  }

  SUBCASE("chart guard") {
    Kernel z = rank_one(g, 1.0 - 5e-7, rng);
    CHECK_THROWS_AS(k_from_zeta(z), NumericalError);
    CHECK_THROWS_AS(PairState(z), NumericalError);
    Kernel ok = rank_one(g, 1.0 - 1e-3, rng);
    CHECK_NOTHROW(PairState(ok));
  }
}

TEST_CASE("pair state derived kernels") {
  auto g = grid16();
  std::mt19937_64 rng(37);
  Kernel k = testing::random_symmetric(g, rng, 0.9);
  Kernel zeta = zeta_from_k(k);
  PairState ps(zeta);
  const double w = g->weight;

  SUBCASE("doubled kernels match sh_ch_from_k at 2k") {
    ShChPair sc2 = sh_ch_from_k(Kernel{2.0 * k.entries, g, SymmetryTag::symmetric});
    auto [sh2k, ch2k] = doubled_kernels(ps);
    CHECK(w * (sh2k.entries - sc2.sh.entries).norm() < 1e-10);
    CHECK(w * (ch2k.entries - sc2.ch.entries).norm() < 1e-10);
  }

  SUBCASE("sh(2k) = 2 sh o ch and the zeta relation") {
    const CMatrix two_shch = 2.0 * compose(ps.sh(), ps.ch()).entries;
    CHECK(w * (two_shch - ps.sh2k().entries).norm() < 1e-10);
    Kernel id = identity_kernel(g);
    const CMatrix lhs = w * (zeta.entries * (id.entries + ps.ch2k().entries));
    CHECK(w * (lhs - ps.sh2k().entries).norm() < 1e-10);
  }

  SUBCASE("conj(sh) o sh = (1 - conj(zeta) zeta)^{-1} - 1 = (ch(2k) - 1)/2") {
    Kernel id = identity_kernel(g);
    const CMatrix shbsh = compose(kconj(ps.sh()), ps.sh()).entries;
    const CMatrix rhs = 0.5 * (ps.ch2k().entries - id.entries);
    CHECK(w * (shbsh - rhs).norm() < 1e-10);
    const CMatrix zw = w * zeta.entries;
    const CMatrix inv = (CMatrix::Identity(zw.rows(), zw.cols()) -
                         zw.conjugate() * zw).inverse();
    const CMatrix alt = (inv - CMatrix::Identity(zw.rows(), zw.cols())) / w;
    CHECK(w * (shbsh - alt).norm() < 1e-10);
  }

  SUBCASE("rank-one doubled closed form") {
    const double lambda = 0.6;
    Kernel k1 = rank_one(g, lambda, rng);
    PairState ps1(zeta_from_k(k1));
    CHECK(w * (ps1.sh2k().entries - std::sinh(2 * lambda) / lambda * k1.entries).norm() <
          1e-11);
  }
}

TEST_CASE("bogoliubov group element") {
  auto g = grid16();
  std::mt19937_64 rng(41);

  SUBCASE("k = 0 gives the identity element") {
    BogoliubovMatrix e = bogoliubov_from_k(zero_kernel(g, SymmetryTag::symmetric));
    GroupResiduals r = check_group_properties(e);
    CHECK(r.sigma_reality < 1e-14);
    CHECK(r.unn < 1e-12);
    CHECK(r.symplectic < 1e-12);
    CHECK((e.pp.entries - identity_kernel(g).entries).norm() < 1e-12);
    CHECK(e.mp.entries.norm() == 0.0);
  }

  SUBCASE("random k satisfies all three group properties") {
    for (double target : {0.5, 1.2}) {
      Kernel k = testing::random_symmetric(g, rng, target);
      GroupResiduals r = check_group_properties(bogoliubov_from_k(k));
      CHECK(r.sigma_reality < 1e-10);
      CHECK(r.unn < 1e-10);
      CHECK(r.symplectic < 1e-10);
    }
  }

  SUBCASE("three independent routes agree") {
    Kernel k = testing::random_symmetric(g, rng, 0.8);
    BogoliubovMatrix a = bogoliubov_from_k(k);
    BogoliubovMatrix b = bogoliubov_from_zeta(zeta_from_k(k));
    BogoliubovMatrix c = bogoliubov_exponential(k);
    CHECK(bogoliubov_block_distance(a, b) < 1e-9);
    CHECK(bogoliubov_block_distance(a, c) < 1e-9);
  }

  SUBCASE("top-left block identity from the group inverse") {
    Kernel k = testing::random_symmetric(g, rng, 1.0);
    BogoliubovMatrix e = bogoliubov_from_k(k);
    const CMatrix lhs = compose(e.pp, e.pp).entries -
                        compose(kconj(e.mp), e.mp).entries;
    CHECK(g->weight * (lhs - identity_kernel(g).entries).norm() < 1e-10);
  }
}

TEST_CASE("path derivatives match finite differences") {
  auto g = grid16();
  std::mt19937_64 rng(43);
  const double w = g->weight;

  Kernel zeta = testing::random_symmetric(g, rng, 0.55);
  Kernel dir = testing::random_symmetric(g, rng, 0.4);
  PairState ps(zeta);
  PairPathDerivatives d = pair_path_derivatives(ps, dir.entries);

  const double eps = 1e-6;
  PairState pp(Kernel{zeta.entries + eps * dir.entries, g, SymmetryTag::symmetric});
  PairState pm(Kernel{zeta.entries - eps * dir.entries, g, SymmetryTag::symmetric});

  auto fd = [eps](const CMatrix& a, const CMatrix& b) { return ((a - b) / (2 * eps)).eval(); };
  CHECK(w * (d.dsh - fd(pp.sh().entries, pm.sh().entries)).norm() < 1e-7);
  CHECK(w * (d.dch - fd(pp.ch().entries, pm.ch().entries)).norm() < 1e-7);
  CHECK(w * (d.dsh2k - fd(pp.sh2k().entries, pm.sh2k().entries)).norm() < 1e-7);
  CHECK(w * (d.dch2k - fd(pp.ch2k().entries, pm.ch2k().entries)).norm() < 1e-7);

  Kernel kp = k_from_zeta(Kernel{zeta.entries + eps * dir.entries, g, SymmetryTag::symmetric});
  Kernel km = k_from_zeta(Kernel{zeta.entries - eps * dir.entries, g, SymmetryTag::symmetric});
  CHECK(w * (d.dk - fd(kp.entries, km.entries)).norm() < 1e-7);
}

TEST_CASE("k-path derivatives via the block exponential") {
  auto g = grid16();
  std::mt19937_64 rng(47);
  const double w = g->weight;

  Kernel k = testing::random_symmetric(g, rng, 0.8);
  Kernel dk = testing::random_symmetric(g, rng, 0.5);
  KPathDerivatives d = k_path_derivatives(k, dk.entries);

  ShChPair sc = sh_ch_from_k(k);
  CHECK(w * (d.sh.entries - sc.sh.entries).norm() < 1e-11);
  CHECK(w * (d.ch.entries - sc.ch.entries).norm() < 1e-11);
  CHECK(w * (d.zeta.entries - zeta_from_k(k).entries).norm() < 1e-11);

  const double eps = 1e-6;
  ShChPair scp = sh_ch_from_k(Kernel{k.entries + eps * dk.entries, g, SymmetryTag::symmetric});
  ShChPair scm = sh_ch_from_k(Kernel{k.entries - eps * dk.entries, g, SymmetryTag::symmetric});
  CHECK(w * (d.dsh - (scp.sh.entries - scm.sh.entries) / (2 * eps)).norm() < 1e-7);
  CHECK(w * (d.dch - (scp.ch.entries - scm.ch.entries) / (2 * eps)).norm() < 1e-7);
  Kernel zp = zeta_from_k(Kernel{k.entries + eps * dk.entries, g, SymmetryTag::symmetric});
  Kernel zm = zeta_from_k(Kernel{k.entries - eps * dk.entries, g, SymmetryTag::symmetric});
  CHECK(w * (d.dzeta - (zp.entries - zm.entries) / (2 * eps)).norm() < 1e-7);

  // consistency of the two derivative routes through the chain rule
  PairState ps(d.zeta);
  PairPathDerivatives pd = pair_path_derivatives(ps, d.dzeta);
  CHECK(w * (pd.dsh - d.dsh).norm() < 1e-9);
  CHECK(w * (pd.dch - d.dch).norm() < 1e-9);
  CHECK(w * (pd.dk - dk.entries).norm() < 1e-9);
}
