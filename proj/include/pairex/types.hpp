#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace pairex {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr Complex I1{0.0, 1.0};

// error taxonomy; the CLI maps these onto exit codes
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  double time = 0.0;
  explicit NumericalError(const std::string& what, double t = 0.0)
      : std::runtime_error(what), time(t) {}
};

struct ToleranceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pairex
