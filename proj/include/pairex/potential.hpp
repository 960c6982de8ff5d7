#pragma once

// Scaled two-body interaction v_N(x) = N^(dim*beta) v(N^beta x), periodized by
// wrapping over box images. The exponent dim*beta keeps the integral of v_N
// equal to the integral of v in every dimension.

#include <string>

#include "pairex/grid.hpp"

namespace pairex {

struct PotentialProfile {
  std::string name = "gaussian";  // gaussian | bump | zero
  double width = 0.5;
  double amplitude = 1.0;
};

struct Potential {
  RVector samples;     // v_N at grid points, displacement from 0 wrapped to the torus
  RMatrix difference;  // v_N(x_j - x_l), n x n
  double N = 1.0;
  double beta = 0.0;
  GridPtr grid;
};

// radial profile value and its effective support radius
double profile_value(const PotentialProfile& p, double r);
double profile_support_radius(const PotentialProfile& p);

Potential make_potential(const PotentialProfile& profile, double N, double beta,
                         GridPtr grid);

// (v_N * rho)(x), periodic convolution by quadrature
RVector convolve(const Potential& v, const RVector& rho);

}  // namespace pairex
