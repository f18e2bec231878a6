// SPDX-License-Identifier: Apache-2.0
#include "mfrf/energy_solver.hpp"

#include <chrono>
#include <cstdio>

namespace mfrf {
namespace {

constexpr Eigen::Index kReducedDimMax = 2048;  // cap on (n_tx - N0) * L

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

// Left side of the secular equation minus the budget; +inf counts as
// positive (left of the root).
double secular_f(const VecD& tau, const VecC& coeffs, double nu, double budget) {
  double acc = 0.0;
  for (Eigen::Index m = 0; m < tau.size(); ++m) {
    const double d = nu - tau(m);
    acc += std::norm(coeffs(m)) / (d * d);
  }
  return acc - budget;
}

}  // namespace

void Scenario::validate() const {
  geom.validate();
  dirs.validate();
  if (!(theta_t_deg > -90.0 && theta_t_deg < 90.0)) {
    throw std::invalid_argument("scenario: target angle outside (-90, 90)");
  }
  if (n_comm < 0 || n_comm > n_dirs()) {
    throw std::invalid_argument("scenario: communication count outside [0, N0]");
  }
  if (desired.rows() != n_dirs()) {
    throw std::invalid_argument("scenario: desired matrix must have one row per direction");
  }
  if (desired.cols() < 1) {
    throw std::invalid_argument("scenario: desired matrix must have at least one column");
  }
  if (!(total_energy > 0.0)) {
    throw std::invalid_argument("scenario: transmit energy must be > 0");
  }
  if (n_dirs() >= geom.n_tx) {
    throw std::invalid_argument(
        "scenario: number of constrained directions must be smaller than n_tx");
  }
}

NullSpaceParam parameterize(const Scenario& scn) {
  scn.validate();
  MatC a = steering_matrix(scn.geom, scn.dirs);
  const int n0 = scn.n_dirs();
  Eigen::JacobiSVD<MatC> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VecD& sing = svd.singularValues();
  const double smax = sing(0);
  const double smin = sing(n0 - 1);
  if (!(smin > 0.0) || (smax / smin) * (smax / smin) >= 1e8) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "steering matrix ill-conditioned: cond(A^H A) = %.3e",
                  smin > 0.0 ? (smax / smin) * (smax / smin)
                             : std::numeric_limits<double>::infinity());
    throw numerical_error(buf);
  }
  MatC scaled = svd.matrixV().adjoint() * scn.desired;  // N0 x L
  for (int k = 0; k < n0; ++k) scaled.row(k) /= sing(k);
  NullSpaceParam p;
  p.steering = std::move(a);
  p.s_hat = svd.matrixU().leftCols(n0) * scaled;
  p.basis = svd.matrixU().rightCols(scn.geom.n_tx - n0);
  const double min_energy = p.s_hat.squaredNorm();
  p.residual_energy = scn.total_energy - min_energy;
  if (!(p.residual_energy > 0.0)) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "infeasible: transmit energy %.6g does not exceed the minimum "
                  "%.6g = tr(D^H (A^H A)^{-1} D) required by the equality constraints",
                  scn.total_energy, min_energy);
    throw infeasible_error(buf);
  }
  return p;
}

double solve_secular(const VecD& spectrum, const VecC& coeffs, double budget) {
  const Eigen::Index m_dim = spectrum.size();
  if (m_dim == 0 || coeffs.size() != m_dim) {
    throw std::invalid_argument("solve_secular: spectrum/coefficient size mismatch");
  }
  if (!(budget > 0.0)) {
    throw std::invalid_argument("solve_secular: budget must be > 0");
  }
  for (Eigen::Index i = 0; i + 1 < m_dim; ++i) {
    if (spectrum(i) < spectrum(i + 1)) {
      throw std::invalid_argument("solve_secular: spectrum must be sorted descending");
    }
  }
  const double cnorm = coeffs.norm();
  if (cnorm == 0.0) {
    throw std::invalid_argument("solve_secular: all-zero coefficients (degenerate case)");
  }
  const double tau1 = spectrum(0);
  const double tau_min = spectrum(m_dim - 1);

  double lo = cnorm / std::sqrt(budget) + tau_min;
  double hi = cnorm / std::sqrt(budget) + tau1;
  const double gap = 1e-14 * std::max(1.0, std::abs(tau1));
  lo = std::max(lo, tau1 + gap);
  if (secular_f(spectrum, coeffs, lo, budget) < 0.0) {
    // No root right of tau1: top-eigenspace overlap too small for the budget.
    throw secular_hard_case(
        "secular equation has no root right of the top eigenvalue");
  }
  // Expand the right end defensively; the analytic bracket already
  // guarantees f(hi) <= 0 up to roundoff.
  for (int k = 0; k < 64 && secular_f(spectrum, coeffs, hi, budget) > 0.0; ++k) {
    hi = lo + 2.0 * (hi - lo);
  }

  // Safeguarded Newton on f; f is convex and decreasing on (tau1, inf), so
  // Newton from the left converges monotonically. Bisection as fallback.
  double x = lo;
  const double tol = 1e-12 * budget;
  for (int it = 0; it < 200; ++it) {
    const double fx = secular_f(spectrum, coeffs, x, budget);
    if (std::isfinite(fx) && std::abs(fx) <= tol) return x;
    if (!std::isfinite(fx) || fx > 0.0) {
      lo = std::max(lo, x);
    } else {
      hi = std::min(hi, x);
    }
    double x_next;
    if (std::isfinite(fx)) {
      double fpx = 0.0;
      for (Eigen::Index m = 0; m < m_dim; ++m) {
        const double d = x - spectrum(m);
        fpx += -2.0 * std::norm(coeffs(m)) / (d * d * d);
      }
      x_next = x - fx / fpx;
      if (!(x_next > lo && x_next < hi)) x_next = 0.5 * (lo + hi);
    } else {
      x_next = 0.5 * (lo + hi);
    }
    if (x_next == x) break;
    x = x_next;
  }
  return x;
}

EnergySolution solve_general(const Scenario& scn, const QuadFormOperator& m_op) {
  const double t0 = now_seconds();
  if (m_op.n_tx() != scn.geom.n_tx || m_op.code_length() != scn.code_length()) {
    throw std::invalid_argument("solve_general: operator dimensions do not match scenario");
  }
  const NullSpaceParam p = parameterize(scn);
  const int n_tx = scn.geom.n_tx;
  const int n0 = scn.n_dirs();
  const int l = scn.code_length();
  const int k_dim = n_tx - n0;
  const Eigen::Index red_dim = static_cast<Eigen::Index>(k_dim) * l;
  if (red_dim > kReducedDimMax) {
    throw numerical_error(
        "solve_general materializes the reduced quadratic form and is limited to "
        "(n_tx - N0) * L <= 2048; use the structured solver for larger problems");
  }

  // Reduced problem over v: maximize (s_hat + Bhat v)† M (s_hat + Bhat v)
  // on the sphere ||v||^2 = residual_energy, Bhat = I_L ⊗ B.
  MatC q_red;
  VecC c_red;
  if (m_op.structured()) {
    const VecC u = p.basis.adjoint() * m_op.kron_vector();
    const MatC block = m_op.kron_coeff() * (u * u.adjoint());
    q_red = MatC::Zero(red_dim, red_dim);
    for (int slot = 0; slot < l; ++slot) {
      q_red.block(slot * k_dim, slot * k_dim, k_dim, k_dim) = block;
    }
    const Eigen::RowVectorXcd emitted = m_op.kron_vector().adjoint() * p.s_hat;
    c_red = flatten(MatC(m_op.kron_coeff() * u * emitted));
  } else {
    MatC bhat = MatC::Zero(m_op.dim(), red_dim);
    for (int slot = 0; slot < l; ++slot) {
      bhat.block(slot * n_tx, slot * k_dim, n_tx, k_dim) = p.basis;
    }
    const MatC mb = m_op.dense() * bhat;
    q_red = bhat.adjoint() * mb;
    c_red = bhat.adjoint() * (m_op.dense() * flatten(p.s_hat));
  }

  const HermEig eig = hermitian_eig(q_red);
  VecD tau_desc(red_dim);
  VecC coeff_desc(red_dim);
  const VecC c_basis = eig.evecs.adjoint() * c_red;
  for (Eigen::Index i = 0; i < red_dim; ++i) {
    tau_desc(i) = eig.evals(red_dim - 1 - i);
    coeff_desc(i) = c_basis(red_dim - 1 - i);
  }

  VecC w = VecC::Zero(red_dim);  // solution in the descending eigenbasis
  double nu = std::numeric_limits<double>::quiet_NaN();
  double secular_residual = std::numeric_limits<double>::quiet_NaN();
  const double cnorm = coeff_desc.norm();
  const double degen_scale =
      std::max(1.0, m_op.lambda_max() * std::sqrt(scn.total_energy));
  if (cnorm <= 1e-14 * degen_scale) {
    // Bhat† M s_hat = 0: the objective has no linear term; documented
    // tie-break puts all free energy on the principal eigenvector.
    w(0) = std::sqrt(p.residual_energy);
    nu = tau_desc(0);
    secular_residual = 0.0;
  } else {
    try {
      nu = solve_secular(tau_desc, coeff_desc, p.residual_energy);
      for (Eigen::Index m = 0; m < red_dim; ++m) {
        w(m) = coeff_desc(m) / (nu - tau_desc(m));
      }
      secular_residual =
          std::abs(secular_f(tau_desc, coeff_desc, nu, p.residual_energy));
    } catch (const secular_hard_case&) {
      // Multiplier pinned at the top eigenvalue; fill the remaining energy
      // inside the top eigenspace (first top eigenvector, deterministic).
      nu = tau_desc(0);
      const double gap_tol = 1e-10 * std::max(1.0, std::abs(tau_desc(0)));
      double used = 0.0;
      for (Eigen::Index m = 0; m < red_dim; ++m) {
        if (tau_desc(m) < tau_desc(0) - gap_tol) {
          w(m) = coeff_desc(m) / (nu - tau_desc(m));
          used += std::norm(w(m));
        }
      }
      w(0) += std::sqrt(std::max(p.residual_energy - used, 0.0));
      secular_residual = 0.0;
    }
  }

  if (w.norm() > 0.0) w *= std::sqrt(p.residual_energy) / w.norm();

  // KKT stationarity in the eigenbasis (exact up to the renormalization).
  double kkt_abs = 0.0;
  for (Eigen::Index m = 0; m < red_dim; ++m) {
    kkt_abs += std::norm((nu - tau_desc(m)) * w(m) - coeff_desc(m));
  }
  kkt_abs = std::sqrt(kkt_abs);

  VecC w_asc(red_dim);
  for (Eigen::Index i = 0; i < red_dim; ++i) w_asc(i) = w(red_dim - 1 - i);
  const VecC v = eig.evecs * w_asc;
  MatC waveform = p.s_hat + p.basis * unflatten(v, k_dim, l);

  EnergySolution sol;
  sol.waveform = std::move(waveform);
  SolverReport& rep = sol.report;
  rep.solver = "energy";
  rep.sinr_total = m_op.quad_mat(sol.waveform);
  if (m_op.structured()) {
    rep.sinr_receive = m_op.kron_coeff();
    rep.sinr_transmit = rep.sinr_total / rep.sinr_receive;
  }
  rep.energy = sol.waveform.squaredNorm();
  rep.equality_residual = (p.steering.adjoint() * sol.waveform - scn.desired).norm();
  rep.secular_nu = nu;
  rep.secular_residual = secular_residual;
  rep.kkt_residual = cnorm > 0.0 ? kkt_abs / cnorm : kkt_abs;
  rep.iterations = 1;
  rep.runtime_seconds = now_seconds() - t0;
  return sol;
}

RadarOnlyResult radar_only_optimum(const QuadFormOperator& m_op, double e_t) {
  if (!(e_t > 0.0)) {
    throw std::invalid_argument("radar_only_optimum: energy must be > 0");
  }
  RadarOnlyResult res;
  res.sinr = e_t * m_op.lambda_max();
  const int n_tx = m_op.n_tx();
  const int l = m_op.code_length();
  if (m_op.structured()) {
    // Top eigenspace is {vec(a x†)}; tie-break: uniform across code slots,
    // which is also constant-modulus.
    const double scale = std::sqrt(e_t / (static_cast<double>(n_tx) * l));
    res.waveform = scale * m_op.kron_vector() * Eigen::RowVectorXcd::Ones(l);
  } else {
    const HermEig& eig = m_op.eig();
    const VecC top = eig.evecs.col(eig.evecs.cols() - 1);
    res.waveform = std::sqrt(e_t) * unflatten(top, n_tx, l);
  }
  return res;
}

}  // namespace mfrf
