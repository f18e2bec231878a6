// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>

#include "mfrf/energy_solver.hpp"

namespace mfrf {

/// Per-antenna constraints: row energy e_t / n_tx exactly, peak-to-average
/// power ratio at most rho. rho = 1 is the constant-modulus case with
/// modulus sqrt(e_t / (L n_tx)).
struct PaprConstraint {
  double rho = 1.0;
  double per_antenna_energy = 0.0;

  void validate(int code_length) const;
};

/// Allowed squared matching error per constrained direction.
struct MatchingTolerances {
  std::vector<double> eps;

  void validate(int n_dirs) const;
};

/// max_l |s(l)|^2 / ((1/L) sum_l |s(l)|^2).
double papr_of(const VecC& s);

/// Maximizer of Re(target† s) subject to ||s||^2 = energy and
/// PAPR(s) <= rho. Closed form for rho = 1; magnitude water-filling with a
/// capped profile otherwise. Zero target entries get zero phase.
VecC papr_project(const VecC& target, double energy, double rho);

/// T = sum_k G(theta_k) G†(theta_k) + M for the ADMM s-update, with the
/// Kronecker fast path I_L ⊗ (A A† + SINR_R a_t a_t†) when M is structured.
class AdmmQuadOperator {
public:
  static AdmmQuadOperator structured(MatC spatial, int code_length);
  static AdmmQuadOperator dense(MatC t, int n_tx, int code_length);

  MatC apply_mat(const MatC& waveform) const;
  double quad_mat(const MatC& waveform) const;
  double lambda_max() const { return lambda_max_; }
  bool is_structured() const { return structured_; }
  int n_tx() const { return n_tx_; }
  int code_length() const { return code_length_; }

private:
  AdmmQuadOperator() = default;

  bool structured_ = true;
  int n_tx_ = 0;
  int code_length_ = 0;
  MatC spatial_;
  std::shared_ptr<const MatC> dense_;
  double lambda_max_ = 0.0;
};

AdmmQuadOperator make_admm_quadratic(const Scenario& scn, const QuadFormOperator& m_op);

struct MmOptions {
  double rel_tol = 1e-6;
  int max_iter = 500;
};

struct MmResult {
  MatC waveform;
  double objective;  // s† T s - 2 Re(t† s)
  int iterations;
};

/// Majorize-minimize loop for min s† T s - 2 Re(t† s) under the
/// per-antenna constraints: each step projects
/// t_bar = t - (T - lambda_max I) s antenna-by-antenna. The objective is
/// non-increasing; an increase beyond 1e-9 slack throws.
MmResult mm_inner_solve(const AdmmQuadOperator& t_op, const MatC& t_mat, MatC start,
                        const PaprConstraint& constraint, const MmOptions& opts = {});

struct AdmmOptions {
  double mu = 5.0;
  uint64_t seed = 0;
  double sinr_rel_tol = 1e-5;
  int max_outer = 2000;
  MmOptions inner;
  int plateau_window = 200;
  bool record_trace = true;
};

struct AdmmSolution {
  MatC waveform;
  SolverReport report;
};

/// ADMM for SINR maximization under matching-error balls and per-antenna
/// energy + PAPR constraints. Starts from a seeded random constant-modulus
/// waveform; identical seed and inputs give an identical iteration trace.
AdmmSolution admm_solve(const Scenario& scn, const QuadFormOperator& m_op,
                        const QuadFormOperator& m_r_op, const MatchingTolerances& tol,
                        const PaprConstraint& constraint, const AdmmOptions& opts = {});

}  // namespace mfrf
