#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "pairex/potential.hpp"

using namespace pairex;

TEST_CASE("laplacian symbol on the 2pi torus") {
  auto g = make_grid(1, 4, 2.0 * M_PI);
  // modes 0, 1, 2, -1
  CHECK(g->laplacian_symbol(0) == doctest::Approx(0.0));
  CHECK(g->laplacian_symbol(1) == doctest::Approx(-1.0));
  CHECK(g->laplacian_symbol(2) == doctest::Approx(-4.0));
  CHECK(g->laplacian_symbol(3) == doctest::Approx(-1.0));
  CHECK(g->laplacian_symbol.maxCoeff() <= 0.0);
}

TEST_CASE("spacing and rejection of invalid grids") {
  auto g = make_grid(1, 2, 1.0);
  CHECK(g->spacing == doctest::Approx(0.5));
  CHECK(g->spacing * g->points_per_axis == doctest::Approx(g->box_length));
  CHECK_THROWS_AS(make_grid(1, 5, 1.0), ConfigError);
  CHECK_THROWS_AS(make_grid(1, 4, -1.0), ConfigError);
  CHECK_THROWS_AS(make_grid(4, 4, 1.0), ConfigError);
}

TEST_CASE("2d symbol at mode (1,1)") {
  auto g = make_grid(2, 8, 2.0 * M_PI);
  const Index flat = g->flatten({1, 1, 0});
  CHECK(g->laplacian_symbol(flat) == doctest::Approx(-2.0));
}

TEST_CASE("transform round trip and Parseval") {
  auto g = make_grid(1, 32, 5.0);
  std::mt19937_64 rng(7);
  CVector f = testing::random_field(g, rng, false);
  CVector back = inverse_transform(*g, transform(*g, f));
  CHECK((back - f).norm() / f.norm() < 1e-12);

  const double quad = g->weight * f.squaredNorm();
  const double spec = g->weight * transform(*g, f).squaredNorm();
  CHECK(quad == doctest::Approx(spec).epsilon(1e-12));
}

TEST_CASE("laplacian reproduces the tabulated symbol on plane waves") {
  auto g = make_grid(1, 16, 2.0 * M_PI);
  for (Index mode : {Index(0), Index(3), Index(9)}) {
    CVector pw(g->total_points);
    for (Index j = 0; j < g->total_points; ++j)
      pw(j) = std::polar(1.0, g->wavenumber[0](mode) * g->coordinate[0](j));
    const CVector lap = apply_laplacian(*g, pw);
    CHECK((lap - g->laplacian_symbol(mode) * pw).norm() < 1e-10 * pw.norm());
    // dense matrix route agrees
    CHECK((g->laplacian.cast<Complex>() * pw - lap).norm() < 1e-10 * pw.norm());
  }
}

TEST_CASE("inner product basics and naive oracle") {
  auto g = make_grid(1, 24, 3.0);
  Field uniform{CVector::Constant(g->total_points,
                                  std::pow(g->box_length, -0.5)),
                g};
  CHECK(inner(uniform, uniform).real() == doctest::Approx(1.0));

  Field zero = make_field(g);
  CHECK(std::abs(inner(uniform, zero)) == 0.0);

  std::mt19937_64 rng(3);
  Field a{testing::random_field(g, rng, false), g};
  Field b{testing::random_field(g, rng, false), g};
  CHECK(std::abs(inner(a, b) - testing::naive_inner(a, b)) < 1e-14 * norm_l2(a) * norm_l2(b) * 100);

  auto g2 = make_grid(1, 24, 4.0);
  Field c{CVector::Zero(g2->total_points), g2};
  CHECK_THROWS_AS(inner(a, c), NumericalError);
}

TEST_CASE("potential scaling and periodized mass") {
  auto g = make_grid(1, 64, 2.0 * M_PI);
  PotentialProfile prof{"gaussian", 0.35, 1.3};

  SUBCASE("beta = 0 leaves the base profile unchanged") {
    Potential base = make_potential(prof, 1.0, 0.0, g);
    Potential scaled = make_potential(prof, 16.0, 0.0, g);
    CHECK((base.samples - scaled.samples).norm() == 0.0);
  }

  SUBCASE("peak amplitude scales by N^beta in d=1") {
    Potential base = make_potential(prof, 16.0, 0.0, g);
    Potential nar = make_potential(prof, 16.0, 0.5, g);
    CHECK(nar.samples(0) / base.samples(0) == doctest::Approx(4.0).epsilon(1e-10));
  }

  SUBCASE("quadrature mass is invariant under the scaling") {
    const double m0 = make_potential(prof, 16.0, 0.0, g).samples.sum() * g->weight;
    const double m1 = make_potential(prof, 16.0, 0.25, g).samples.sum() * g->weight;
    const double m2 = make_potential(prof, 16.0, 0.5, g).samples.sum() * g->weight;
    CHECK(std::abs(m1 - m0) / m0 < 1e-6);
    CHECK(std::abs(m2 - m0) / m0 < 1e-6);
  }

  SUBCASE("under-resolved scaling is rejected") {
    CHECK_THROWS_AS(make_potential(prof, 4096.0, 1.0, g), ConfigError);
  }

  SUBCASE("support must fit in half the box") {
    PotentialProfile wide{"bump", 2.0, 1.0};
    CHECK_THROWS_AS(make_potential(wide, 4.0, 0.0, g), ConfigError);
  }

  SUBCASE("difference matrix samples displacements") {
    Potential p = make_potential(prof, 4.0, 0.25, g);
    CHECK(p.difference(5, 5) == doctest::Approx(p.samples(0)));
    CHECK(p.difference(7, 2) == doctest::Approx(p.samples(5)));
    CHECK(p.difference(2, 7) == doctest::Approx(p.samples(g->points_per_axis - 5)));
  }
}

TEST_CASE("bump profile is compactly supported and nonnegative") {
  auto g = make_grid(1, 32, 8.0);
  PotentialProfile prof{"bump", 0.9, 2.0};
  Potential p = make_potential(prof, 1.0, 0.0, g);
  CHECK(p.samples.minCoeff() >= 0.0);
  CHECK(p.samples(0) == doctest::Approx(2.0));
  // beyond the support radius the samples vanish
  for (Index j = 0; j < g->total_points; ++j) {
    double x = g->coordinate[0](j);
    if (x > 4.0) x -= 8.0;
    if (std::abs(x) > 0.95) CHECK(p.samples(j) == 0.0);
  }
}
