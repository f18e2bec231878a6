// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mfrf/array_model.hpp"
#include "mfrf/common.hpp"
#include "mfrf/disturbance.hpp"
#include "mfrf/report.hpp"

namespace mfrf {

/// One design problem: geometry, target direction, constrained directions
/// (communication first, then jamming), desired signal matrix D (one row
/// per direction), and the total transmit energy budget.
struct Scenario {
  ArrayGeometry geom;
  double theta_t_deg = 0.0;
  DirectionSet dirs;
  int n_comm = 0;
  MatC desired;          // N0 x L
  double total_energy = 0.0;  // e_t

  int n_dirs() const { return dirs.size(); }
  int n_jam() const { return dirs.size() - n_comm; }
  int code_length() const { return static_cast<int>(desired.cols()); }
  void validate() const;
};

/// Null-space parameterization of the equality constraint A† S = D:
/// every feasible S is s_hat + B V with B an orthonormal basis of the
/// null space of A†. residual_energy is what the energy budget leaves
/// for V.
struct NullSpaceParam {
  MatC steering;          // A, n_tx x N0
  MatC s_hat;             // minimum-norm particular solution, n_tx x L
  MatC basis;             // B, n_tx x (n_tx - N0)
  double residual_energy; // e_t - ||s_hat||_F^2
};

NullSpaceParam parameterize(const Scenario& scn);

/// Root of sum_m |coeffs_m|^2 / (nu - spectrum_m)^2 = budget on
/// (spectrum_max, inf). spectrum must be sorted descending. Throws
/// secular_hard_case when the root does not exist on that interval
/// (zero overlap with the top eigenspace).
class secular_hard_case : public numerical_error {
public:
  using numerical_error::numerical_error;
};

double solve_secular(const VecD& spectrum, const VecC& coeffs, double budget);

struct EnergySolution {
  MatC waveform;
  SolverReport report;
};

/// Lagrange/secular-equation solver for max s† M s subject to A† S = D
/// and ||S||_F^2 = e_t, for any Hermitian PSD M. Deterministic.
EnergySolution solve_general(const Scenario& scn, const QuadFormOperator& m_op);

struct RadarOnlyResult {
  MatC waveform;
  double sinr;  // e_t lambda_max(M)
};

/// Unconstrained-direction baseline: all energy on the principal
/// eigenvector of M.
RadarOnlyResult radar_only_optimum(const QuadFormOperator& m_op, double e_t);

}  // namespace mfrf
