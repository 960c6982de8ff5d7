#include "pairex/potential.hpp"

#include <cmath>

namespace pairex {

double profile_value(const PotentialProfile& p, double r) {
  if (p.name == "zero") return 0.0;
  if (p.name == "gaussian") {
    const double t = r / p.width;
    return p.amplitude * std::exp(-0.5 * t * t);
  }
  if (p.name == "bump") {
    const double t = r / p.width;
    if (t * t >= 1.0) return 0.0;
    return p.amplitude * std::exp(1.0 - 1.0 / (1.0 - t * t));
  }
  throw ConfigError("unknown potential profile '" + p.name + "'");
}

double profile_support_radius(const PotentialProfile& p) {
  if (p.name == "zero") return 0.0;
  if (p.name == "gaussian") return 3.0 * p.width;
  if (p.name == "bump") return p.width;
  throw ConfigError("unknown potential profile '" + p.name + "'");
}

Potential make_potential(const PotentialProfile& profile, double N, double beta,
                         GridPtr grid) {
  if (!(N >= 1.0)) throw ConfigError("make_potential: N must be >= 1");
  if (beta < 0.0 || beta > 1.0) throw ConfigError("make_potential: beta must lie in [0,1]");
  if (profile.amplitude < 0.0)
    throw ConfigError("make_potential: profile must be nonnegative");

  const double support = profile_support_radius(profile);
  const double L = grid->box_length;
  const double h = grid->spacing;
  if (profile.name != "zero") {
    if (2.0 * support > 0.5 * L)
      throw ConfigError("make_potential: potential support exceeds half the box");
    const double scaled_diameter = 2.0 * support / std::pow(N, beta);
    if (scaled_diameter < 3.0 * h)
      throw ConfigError("make_potential: scaled potential under-resolved (< 3 grid cells)");
  }

  const Index n = grid->total_points;
  const double scale = std::pow(N, beta);
  const double amp = std::pow(N, grid->dim * beta);

  Potential pot;
  pot.N = N;
  pot.beta = beta;
  pot.grid = grid;
  pot.samples = RVector::Zero(n);

  // periodize: sum the scaled profile over box images around the wrapped point
  const int images = 4;
  for (Index j = 0; j < n; ++j) {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < grid->dim; ++a) {
      double xa = grid->coordinate[a](j);
      if (xa > 0.5 * L) xa -= L;
      x[a] = xa;
    }
    double sum = 0.0;
    std::array<int, 3> m{0, 0, 0};
    const int lo = -images, hi = images;
    for (m[0] = lo; m[0] <= (grid->dim > 0 ? hi : lo); ++m[0]) {
      for (m[1] = (grid->dim > 1 ? lo : 0); m[1] <= (grid->dim > 1 ? hi : 0); ++m[1]) {
        for (m[2] = (grid->dim > 2 ? lo : 0); m[2] <= (grid->dim > 2 ? hi : 0); ++m[2]) {
          double r2 = 0.0;
          for (int a = 0; a < grid->dim; ++a) {
            const double d = scale * (x[a] + m[a] * L);
            r2 += d * d;
          }
          sum += profile_value(profile, std::sqrt(r2));
        }
      }
    }
    pot.samples(j) = amp * sum;
  }

  // v_N(x_j - x_l): per-axis index difference modulo M
  pot.difference = RMatrix::Zero(n, n);
  const int M = grid->points_per_axis;
  for (Index j = 0; j < n; ++j) {
    auto ij = grid->unflatten(j);
    for (Index l = 0; l < n; ++l) {
      auto il = grid->unflatten(l);
      std::array<int, 3> dd{0, 0, 0};
      for (int a = 0; a < grid->dim; ++a) dd[a] = ((ij[a] - il[a]) % M + M) % M;
      pot.difference(j, l) = pot.samples(grid->flatten(dd));
    }
  }
  return pot;
}

RVector convolve(const Potential& v, const RVector& rho) {
  return v.grid->weight * (v.difference * rho);
}

}  // namespace pairex
