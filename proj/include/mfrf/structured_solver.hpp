// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mfrf/disturbance.hpp"
#include "mfrf/energy_solver.hpp"

namespace mfrf {

/// Closed-form optimum for the structured covariance I_L ⊗ R̄:
/// S = s_hat + sqrt(e_res) B ū q̄†, transmit SINR (||q|| + sqrt(e_res)||u||)^2.
struct StructuredSolution {
  MatC waveform;
  VecC q;         // s_hat† a(theta_t)
  VecC u;         // B† a(theta_t)
  double beta0;   // sqrt(e_res) / (||u|| ||q||); NaN in degenerate branches
  double residual_energy;
  double sinr_t;
  double sinr_r;
  double sinr_total;
  SolverReport report;
};

StructuredSolution solve_structured(const Scenario& scn,
                                    const StructuredCovariance& model);

/// N0 = 1: the optimum is rank one, S = w d^T with
/// w = alpha_1 a(theta_bar) + alpha_2 a(theta_t).
struct CoherentSolution {
  VecC beamformer;  // w
  cxd alpha1;
  cxd alpha2;
  StructuredSolution solution;
};

CoherentSolution coherent_case(const Scenario& scn, const StructuredCovariance& model);

struct SinrApproximation {
  double value;   // approximate transmit SINR
  bool valid;     // false when G_sos > 1 or the approximate energy budget is negative
  double g_sos;   // sum of squared normalized gains
};

/// Large-array sidelobe approximation of the achievable transmit SINR
/// from normalized gains and desired-signal energies alone.
SinrApproximation approximate_sinr(const Scenario& scn);

/// Same formula driven by explicit gains (shared core, also used by tests).
SinrApproximation approximate_sinr_from_gains(double e_t, int n_tx,
                                              const VecD& energies, const VecD& gains);

/// Equal-energy upper bound e_t n_tx - (N0 - 1) e_bar on the transmit SINR.
double sinr_bound_case2(double e_t, int n_tx, int n_dirs, double e_bar);

}  // namespace mfrf
