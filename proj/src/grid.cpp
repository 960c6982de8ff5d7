#include "pairex/grid.hpp"

#include <cmath>

namespace pairex {

namespace {

// integer Fourier frequency of mode index k on an M-point axis: 0..M/2, then negative
int mode_frequency(int k, int M) { return (k <= M / 2) ? k : k - M; }

}  // namespace

std::array<int, 3> Grid::unflatten(Index flat) const {
  std::array<int, 3> idx{0, 0, 0};
  const int M = points_per_axis;
  for (int a = 0; a < dim; ++a) {
    idx[a] = static_cast<int>(flat % M);
    flat /= M;
  }
  return idx;
}

Index Grid::flatten(const std::array<int, 3>& idx) const {
  Index flat = 0;
  const int M = points_per_axis;
  for (int a = dim - 1; a >= 0; --a) flat = flat * M + idx[a];
  return flat;
}

GridPtr make_grid(int dim, int points_per_axis, double box_length) {
  if (dim < 1 || dim > 3) throw ConfigError("make_grid: dim must be 1, 2 or 3");
  if (points_per_axis < 2 || points_per_axis % 2 != 0)
    throw ConfigError("make_grid: points_per_axis must be even and >= 2");
  if (!(box_length > 0.0)) throw ConfigError("make_grid: box_length must be positive");

  auto g = std::make_shared<Grid>();
  g->dim = dim;
  g->points_per_axis = points_per_axis;
  g->box_length = box_length;
  g->spacing = box_length / points_per_axis;
  Index n = 1;
  for (int a = 0; a < dim; ++a) n *= points_per_axis;
  if (n > 4096) throw ConfigError("make_grid: grid too large for dense kernels");
  g->total_points = n;
  g->weight = std::pow(g->spacing, dim);

  const int M = points_per_axis;
  const double two_pi_over_L = 2.0 * M_PI / box_length;

  g->laplacian_symbol = RVector::Zero(n);
  g->wavenumber.assign(dim, RVector::Zero(n));
  g->coordinate.assign(dim, RVector::Zero(n));
  for (Index j = 0; j < n; ++j) {
    auto idx = g->unflatten(j);
    double s = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double xi = two_pi_over_L * mode_frequency(idx[a], M);
      g->wavenumber[a](j) = xi;
      g->coordinate[a](j) = g->spacing * idx[a];
      s -= xi * xi;
    }
    g->laplacian_symbol(j) = s;
  }

  // unitary DFT per axis, Kronecker product over axes
  CMatrix axis(M, M);
  const double scale = 1.0 / std::sqrt(static_cast<double>(M));
  for (int k = 0; k < M; ++k)
    for (int j = 0; j < M; ++j)
      axis(k, j) = std::polar(scale, -2.0 * M_PI * double(k) * double(j) / M);

  g->dft = CMatrix::Ones(n, n);
  for (Index r = 0; r < n; ++r) {
    auto kr = g->unflatten(r);
    for (Index c = 0; c < n; ++c) {
      auto jc = g->unflatten(c);
      Complex v = 1.0;
      for (int a = 0; a < dim; ++a) v *= axis(kr[a], jc[a]);
      g->dft(r, c) = v;
    }
  }
  g->idft = g->dft.adjoint();

  CMatrix lap = g->idft * g->laplacian_symbol.asDiagonal() * g->dft;
  g->laplacian = lap.real();
  g->laplacian = 0.5 * (g->laplacian + g->laplacian.transpose()).eval();

  g->gradient.resize(dim);
  for (int a = 0; a < dim; ++a) {
    CVector sym = I1 * g->wavenumber[a].cast<Complex>();
    g->gradient[a] = g->idft * sym.asDiagonal() * g->dft;
  }

  return g;
}

Field make_field(GridPtr grid) {
  return Field{CVector::Zero(grid->total_points), std::move(grid)};
}

Field make_field(GridPtr grid, const CVector& vals) {
  if (vals.size() != grid->total_points)
    throw ConfigError("make_field: value count does not match grid");
  return Field{vals, std::move(grid)};
}

void require_same_grid(const GridPtr& a, const GridPtr& b, const char* where) {
  if (a == b) return;
  if (!a || !b || a->dim != b->dim || a->points_per_axis != b->points_per_axis ||
      a->box_length != b->box_length)
    throw NumericalError(std::string(where) + ": grid mismatch");
}

Complex inner(const Field& a, const Field& b) {
  require_same_grid(a.grid, b.grid, "inner");
  return a.grid->weight * a.values.dot(b.values);
}

double norm_l2(const Field& a) { return std::sqrt(std::abs(inner(a, a).real())); }

CVector transform(const Grid& g, const CVector& f) { return g.dft * f; }

CVector inverse_transform(const Grid& g, const CVector& fh) { return g.idft * fh; }

CVector apply_laplacian(const Grid& g, const CVector& f) {
  CVector fh = g.dft * f;
  fh.array() *= g.laplacian_symbol.array().cast<Complex>();
  return g.idft * fh;
}

CVector apply_gradient(const Grid& g, int axis, const CVector& f) {
  CVector fh = g.dft * f;
  fh.array() *= (I1 * g.wavenumber[axis].cast<Complex>()).array();
  return g.idft * fh;
}

CVector kinetic_phase(const Grid& g, const CVector& f, double tau) {
  CVector fh = g.dft * f;
  for (Index j = 0; j < fh.size(); ++j)
    fh(j) *= std::polar(1.0, g.laplacian_symbol(j) * tau);
  return g.idft * fh;
}

}  // namespace pairex
