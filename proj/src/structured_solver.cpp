// SPDX-License-Identifier: Apache-2.0
#include "mfrf/structured_solver.hpp"

#include <chrono>

namespace mfrf {
namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

StructuredSolution solve_structured(const Scenario& scn,
                                    const StructuredCovariance& model) {
  const double t0 = now_seconds();
  model.validate();
  if (model.code_length != scn.code_length()) {
    throw std::invalid_argument("solve_structured: covariance code length mismatch");
  }
  const NullSpaceParam p = parameterize(scn);
  const int l = scn.code_length();
  const int k_dim = scn.geom.n_tx - scn.n_dirs();
  const VecC a_t = tx_steering(scn.geom, scn.theta_t_deg);

  StructuredSolution sol;
  sol.q = p.s_hat.adjoint() * a_t;
  sol.u = p.basis.adjoint() * a_t;
  sol.residual_energy = p.residual_energy;
  sol.sinr_r = receive_sinr(model, scn.geom, scn.theta_t_deg);

  const double nq = sol.q.norm();
  const double nu = sol.u.norm();
  const double root_e = std::sqrt(p.residual_energy);
  const double tol_u = 1e-10 * std::sqrt(static_cast<double>(scn.geom.n_tx));
  const double tol_q = 1e-14 * std::max(1.0, p.s_hat.norm() *
                                                 std::sqrt(double(scn.geom.n_tx)));

  MatC v_opt(k_dim, l);
  sol.beta0 = std::numeric_limits<double>::quiet_NaN();
  if (nu <= tol_u) {
    // a(theta_t) lies in the range of A: the free energy cannot reach the
    // target. Deterministic filler carrying the energy budget.
    v_opt = MatC::Zero(k_dim, l);
    v_opt(0, 0) = root_e;
  } else if (nq <= tol_q) {
    // No particular-solution component toward the target (e.g. D = 0):
    // put all free energy on ū, first canonical code direction.
    v_opt = MatC::Zero(k_dim, l);
    v_opt.col(0) = root_e * (sol.u / nu);
  } else {
    v_opt = root_e * (sol.u / nu) * (sol.q / nq).adjoint();
    sol.beta0 = root_e / (nu * nq);
  }
  // Exact energy split: ||S||^2 = ||s_hat||^2 + ||V||^2.
  if (v_opt.norm() > 0.0) v_opt *= root_e / v_opt.norm();
  sol.waveform = p.s_hat + p.basis * v_opt;

  sol.sinr_t = (a_t.adjoint() * sol.waveform).squaredNorm();
  sol.sinr_total = sol.sinr_t * sol.sinr_r;

  SolverReport& rep = sol.report;
  rep.solver = "structured";
  rep.sinr_total = sol.sinr_total;
  rep.sinr_transmit = sol.sinr_t;
  rep.sinr_receive = sol.sinr_r;
  rep.energy = sol.waveform.squaredNorm();
  rep.equality_residual = (p.steering.adjoint() * sol.waveform - scn.desired).norm();
  rep.iterations = 1;
  rep.runtime_seconds = now_seconds() - t0;
  return sol;
}

CoherentSolution coherent_case(const Scenario& scn, const StructuredCovariance& model) {
  if (scn.n_dirs() != 1) {
    throw std::logic_error("coherent_case requires exactly one constrained direction");
  }
  CoherentSolution res;
  res.solution = solve_structured(scn, model);

  const double theta_bar = scn.dirs.angles_deg[0];
  const VecC a_bar = tx_steering(scn.geom, theta_bar);
  const VecC a_t = tx_steering(scn.geom, scn.theta_t_deg);
  const double n_tx = static_cast<double>(scn.geom.n_tx);
  const cxd b_pat = normalized_beampattern(scn.geom, scn.theta_t_deg, theta_bar);
  const double gain = std::abs(b_pat);
  const double d_norm = scn.desired.row(0).norm();
  const double root_e = std::sqrt(res.solution.residual_energy);
  const double norm_u = res.solution.u.norm();
  const double norm_q = res.solution.q.norm();
  const double tol_u = 1e-10 * std::sqrt(n_tx);

  if (norm_u <= tol_u) {
    // theta_bar coincides with theta_t: only the matched component has a
    // beamformer; the energy filler from solve_structured is rank two.
    res.alpha1 = cxd(1.0 / n_tx, 0.0);
    res.alpha2 = cxd(0.0, 0.0);
  } else if (norm_q <= 1e-14 * std::max(1.0, d_norm) || d_norm == 0.0) {
    // Beampattern null (G = 0): matching along a(theta_bar) and detection
    // along the projected a(theta_t) decouple; align the free code
    // direction with conj(d) so the waveform stays rank one.
    res.alpha1 = cxd(1.0 / n_tx, 0.0) -
                 (d_norm > 0.0 ? (root_e / (norm_u * d_norm)) * b_pat : cxd(0.0, 0.0));
    res.alpha2 = d_norm > 0.0 ? cxd(root_e / (norm_u * d_norm), 0.0) : cxd(0.0, 0.0);
    if (d_norm > 0.0) {
      const VecC w = res.alpha1 * a_bar + res.alpha2 * a_t;
      res.solution.waveform = w * scn.desired.row(0);
      res.solution.sinr_t = (a_t.adjoint() * res.solution.waveform).squaredNorm();
      res.solution.sinr_total = res.solution.sinr_t * res.solution.sinr_r;
      res.solution.report.sinr_total = res.solution.sinr_total;
      res.solution.report.sinr_transmit = res.solution.sinr_t;
      res.solution.report.energy = res.solution.waveform.squaredNorm();
      res.solution.report.equality_residual =
          (a_bar.adjoint() * res.solution.waveform - scn.desired.row(0)).norm();
    }
  } else {
    const double beta0 = res.solution.beta0;
    res.alpha1 = cxd(1.0 / n_tx - beta0 * gain * gain, 0.0);
    res.alpha2 = beta0 * std::conj(b_pat);
  }
  res.beamformer = res.alpha1 * a_bar + res.alpha2 * a_t;
  return res;
}

SinrApproximation approximate_sinr_from_gains(double e_t, int n_tx,
                                              const VecD& energies, const VecD& gains) {
  if (energies.size() != gains.size()) {
    throw std::invalid_argument("approximate_sinr: energies/gains size mismatch");
  }
  SinrApproximation out;
  out.g_sos = gains.array().square().sum();
  const double matched = (energies.array() * gains.array().square()).sum();
  const double e_res_approx = e_t - energies.sum() / static_cast<double>(n_tx);
  out.valid = out.g_sos <= 1.0 && e_res_approx > 0.0;
  const double free_term =
      std::max(e_res_approx, 0.0) * n_tx * std::max(1.0 - out.g_sos, 0.0);
  const double root = std::sqrt(matched) + std::sqrt(free_term);
  out.value = root * root;
  return out;
}

SinrApproximation approximate_sinr(const Scenario& scn) {
  scn.validate();
  const int n0 = scn.n_dirs();
  VecD energies(n0), gains(n0);
  for (int k = 0; k < n0; ++k) {
    energies(k) = scn.desired.row(k).squaredNorm();
    gains(k) = beampattern_gain(scn.geom, scn.theta_t_deg, scn.dirs.angles_deg[k]);
  }
  return approximate_sinr_from_gains(scn.total_energy, scn.geom.n_tx, energies, gains);
}

double sinr_bound_case2(double e_t, int n_tx, int n_dirs, double e_bar) {
  if (!(e_t > 0.0) || n_tx < 1 || n_dirs < 1 || !(e_bar > 0.0)) {
    throw std::invalid_argument("sinr_bound_case2: arguments must be positive");
  }
  return e_t * n_tx - (n_dirs - 1) * e_bar;
}

}  // namespace mfrf
