// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mfrf {

using cxd = std::complex<double>;
using VecC = Eigen::VectorXcd;
using VecD = Eigen::VectorXd;
using MatC = Eigen::MatrixXcd;
using MatD = Eigen::MatrixXd;

inline constexpr double pi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * pi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / pi; }

// Power quantities throughout; dB is always 10*log10.
inline double lin2db(double x) { return 10.0 * std::log10(x); }
inline double db2lin(double x) { return std::pow(10.0, x / 10.0); }

/// A scenario whose constraints cannot be met (e.g. transmit energy below
/// the minimum required by the equality constraints).
class infeasible_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Numerical breakdown: singular/ill-conditioned systems, failed
/// factorizations, eigenvalues outside tolerated ranges.
class numerical_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Column-major vectorization, s = vec(S): s[l*rows + n] = S(n, l).
inline VecC flatten(const MatC& m) {
  return Eigen::Map<const VecC>(m.data(), m.size());
}

inline MatC unflatten(const VecC& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) {
    throw std::invalid_argument("unflatten: size mismatch");
  }
  return Eigen::Map<const MatC>(v.data(), rows, cols);
}

}  // namespace mfrf
