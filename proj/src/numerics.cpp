// SPDX-License-Identifier: Apache-2.0
#include "mfrf/numerics.hpp"

namespace mfrf {
namespace {

// Acklam-style rational approximation of the standard normal quantile,
// used only as a Newton starting point.
double normal_quantile_approx(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace

double erfc_inv(double y) {
  if (!(y > 0.0 && y < 2.0)) {
    throw std::invalid_argument("erfc_inv: argument must lie in (0, 2)");
  }
  // erfc(x) = 2 Phi(-x sqrt(2))  =>  x = -Phi^{-1}(y/2)/sqrt(2)
  double x = -normal_quantile_approx(y / 2.0) / std::sqrt(2.0);
  // Newton refinement on f(x) = erfc(x) - y; f'(x) = -2/sqrt(pi) exp(-x^2).
  for (int it = 0; it < 6; ++it) {
    const double f = std::erfc(x) - y;
    const double fp = -2.0 / std::sqrt(pi) * std::exp(-x * x);
    const double step = f / fp;
    x -= step;
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(x))) break;
  }
  return x;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("normal_quantile: argument must lie in (0, 1)");
  }
  return -std::sqrt(2.0) * erfc_inv(2.0 * p);
}

HermEig hermitian_eig(const MatC& h) {
  if (h.rows() != h.cols()) {
    throw std::invalid_argument("hermitian_eig: matrix must be square");
  }
  const MatC sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<MatC> es(sym);
  if (es.info() != Eigen::Success) {
    throw numerical_error("hermitian_eig: eigendecomposition failed");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

double power_iteration_lambda_max(const std::function<VecC(const VecC&)>& apply,
                                  Eigen::Index dim, double rel_tol, int max_iter) {
  if (dim <= 0) throw std::invalid_argument("power_iteration: empty operator");
  // Deterministic start with nonzero projection on (almost) any direction.
  VecC v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    v(i) = cxd(1.0 + 1e-3 * static_cast<double>(i % 97),
               1e-4 * static_cast<double>(i % 89));
  }
  v /= v.norm();
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    VecC w = apply(v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;  // v in the null space and operator PSD
    w /= nw;
    const double lambda_new = std::real(w.dot(apply(w)));
    const bool converged =
        std::abs(lambda_new - lambda) <= rel_tol * std::max(1.0, std::abs(lambda_new));
    v = std::move(w);
    lambda = lambda_new;
    if (converged && it > 0) return lambda;
  }
  return lambda;
}

}  // namespace mfrf
