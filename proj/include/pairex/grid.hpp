#pragma once

// Periodic torus discretization. All integrals are rectangle-rule sums with
// weight h^dim, which is spectrally accurate for smooth periodic integrands.
// Spectral operators are built from a dense unitary DFT matrix; grids are
// small (kernels are total_points^2 objects), so dense transforms are the
// natural representation here.

#include <array>
#include <memory>
#include <vector>

#include "pairex/types.hpp"

namespace pairex {

struct Grid {
  int dim = 1;
  int points_per_axis = 0;  // M, even
  double box_length = 0.0;  // L
  double spacing = 0.0;     // h = L/M
  Index total_points = 0;   // n = M^dim
  double weight = 0.0;      // h^dim, quadrature weight

  RVector laplacian_symbol;           // -|xi|^2 per flattened Fourier mode
  std::vector<RVector> wavenumber;    // xi component per axis, flattened
  std::vector<RVector> coordinate;    // x component per axis, flattened

  CMatrix dft;        // unitary forward transform, n x n
  CMatrix idft;       // adjoint of dft
  RMatrix laplacian;  // matrix of the spectral Laplacian on grid functions
  std::vector<CMatrix> gradient;  // matrix of spectral d/dx_a per axis

  // flattened index <-> per-axis indices (row of axis digits, base M)
  std::array<int, 3> unflatten(Index flat) const;
  Index flatten(const std::array<int, 3>& idx) const;
};

using GridPtr = std::shared_ptr<const Grid>;

// dim in {1,2,3}, points_per_axis even and >= 2, box_length > 0
GridPtr make_grid(int dim, int points_per_axis, double box_length);

struct Field {
  CVector values;
  GridPtr grid;
};

Field make_field(GridPtr grid);                       // zero field
Field make_field(GridPtr grid, const CVector& vals);  // checked length

// discrete L2 pairing h^dim * sum conj(a_j) b_j
Complex inner(const Field& a, const Field& b);
double norm_l2(const Field& a);

CVector transform(const Grid& g, const CVector& f);          // to Fourier
CVector inverse_transform(const Grid& g, const CVector& fh);  // back
CVector apply_laplacian(const Grid& g, const CVector& f);
CVector apply_gradient(const Grid& g, int axis, const CVector& f);

// multiply each Fourier mode by exp(i * laplacian_symbol * tau)
CVector kinetic_phase(const Grid& g, const CVector& f, double tau);

void require_same_grid(const GridPtr& a, const GridPtr& b, const char* where);

}  // namespace pairex
