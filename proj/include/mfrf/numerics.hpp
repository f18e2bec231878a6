// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

#include "mfrf/common.hpp"

namespace mfrf {

/// Inverse of the complementary error function on (0, 2).
double erfc_inv(double y);

/// Standard normal quantile function.
double normal_quantile(double p);

struct HermEig {
  VecD evals;  // ascending
  MatC evecs;  // columns match evals
};

/// Eigendecomposition of a Hermitian matrix; the input is symmetrized
/// first so roundoff asymmetry cannot leak into the result. Deterministic
/// for a fixed input.
HermEig hermitian_eig(const MatC& h);

/// Largest eigenvalue of a Hermitian PSD operator given as a matvec,
/// via power iteration with a deterministic start vector.
double power_iteration_lambda_max(const std::function<VecC(const VecC&)>& apply,
                                  Eigen::Index dim, double rel_tol = 1e-10,
                                  int max_iter = 20000);

}  // namespace mfrf
