// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <limits>
#include <string>
#include <vector>

namespace mfrf {

struct IterationRecord {
  int iteration = 0;
  double sinr = 0.0;                        // s† M s
  std::vector<double> matching_residuals;   // ||G†(theta_k) s - d_k||^2
  double primal_residual_match = 0.0;       // max_k ||y_k - (G† s - d_k)||
  double primal_residual_sinr = 0.0;        // ||v - M_r s||
  double inner_objective = 0.0;
  int inner_iterations = 0;
};

struct SolverReport {
  std::string solver;
  double sinr_total = 0.0;
  double sinr_transmit = std::numeric_limits<double>::quiet_NaN();
  double sinr_receive = std::numeric_limits<double>::quiet_NaN();
  double energy = 0.0;
  double equality_residual = 0.0;           // ||A† S - D||_F
  std::vector<double> matching_residuals;   // squared, per direction
  double papr_max = 0.0;
  double secular_nu = std::numeric_limits<double>::quiet_NaN();
  double secular_residual = std::numeric_limits<double>::quiet_NaN();
  double kkt_residual = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  int inner_iterations_total = 0;
  int mm_monotonicity_violations = 0;
  double runtime_seconds = 0.0;
  uint64_t seed = 0;
  bool converged = true;
  std::vector<IterationRecord> trace;
};

}  // namespace mfrf
