// SPDX-License-Identifier: Apache-2.0
#include "mfrf/papr_solver.hpp"

#include <chrono>
#include <cstdio>

#include "mfrf/numerics.hpp"
#include "mfrf/rng.hpp"

namespace mfrf {
namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

void PaprConstraint::validate(int code_length) const {
  if (!(per_antenna_energy > 0.0)) {
    throw std::invalid_argument("papr constraint: per-antenna energy must be > 0");
  }
  if (!(rho >= 1.0 && rho <= static_cast<double>(code_length))) {
    throw std::invalid_argument("papr constraint: rho must lie in [1, L]");
  }
}

void MatchingTolerances::validate(int n_dirs) const {
  if (static_cast<int>(eps.size()) != n_dirs) {
    throw std::invalid_argument("matching tolerances: one eps per constrained direction");
  }
  for (double e : eps) {
    if (!(e > 0.0)) {
      throw std::invalid_argument("matching tolerances: eps must be > 0");
    }
  }
}

double papr_of(const VecC& s) {
  if (s.size() == 0) throw std::invalid_argument("papr_of: empty sequence");
  const double mean = s.squaredNorm() / static_cast<double>(s.size());
  if (mean == 0.0) return 0.0;
  double peak = 0.0;
  for (Eigen::Index l = 0; l < s.size(); ++l) peak = std::max(peak, std::norm(s(l)));
  return peak / mean;
}

VecC papr_project(const VecC& target, double energy, double rho) {
  const Eigen::Index l = target.size();
  if (l == 0) throw std::invalid_argument("papr_project: empty target");
  if (!(energy > 0.0)) throw std::invalid_argument("papr_project: energy must be > 0");
  if (!(rho >= 1.0 && rho <= static_cast<double>(l))) {
    throw std::invalid_argument("papr_project: rho must lie in [1, L]");
  }

  VecD mag(l);
  VecC phase(l);
  for (Eigen::Index i = 0; i < l; ++i) {
    mag(i) = std::abs(target(i));
    phase(i) = mag(i) > 0.0 ? target(i) / mag(i) : cxd(1.0, 0.0);
  }

  if (rho == 1.0) {
    const double a_s = std::sqrt(energy / static_cast<double>(l));
    return a_s * phase;
  }

  const double peak2 = rho * energy / static_cast<double>(l);
  VecD m(l);
  if (mag.maxCoeff() == 0.0) {
    m.setConstant(std::sqrt(energy / static_cast<double>(l)));
  } else {
    Eigen::Index n_pos = 0;
    for (Eigen::Index i = 0; i < l; ++i) n_pos += mag(i) > 0.0 ? 1 : 0;
    if (static_cast<double>(n_pos) * peak2 <= energy && n_pos < l) {
      // Even fully capped, the matched entries cannot carry the energy;
      // the rest goes uniformly on the zero-target entries.
      const double rest =
          (energy - static_cast<double>(n_pos) * peak2) / static_cast<double>(l - n_pos);
      for (Eigen::Index i = 0; i < l; ++i) {
        m(i) = mag(i) > 0.0 ? std::sqrt(peak2) : std::sqrt(rest);
      }
    } else {
      // Capped water-filling m_i = min(c |t_i|, peak); sum m^2 is
      // increasing in c, solved by bisection.
      const auto level_energy = [&](double c) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < l; ++i) {
          acc += std::min(c * c * mag(i) * mag(i), peak2);
        }
        return acc;
      };
      double c_lo = 0.0;
      double c_hi = std::sqrt(energy) / mag.norm();
      for (int k = 0; k < 64 && level_energy(c_hi) < energy; ++k) c_hi *= 2.0;
      for (int it = 0; it < 100; ++it) {
        const double c_mid = 0.5 * (c_lo + c_hi);
        const double e_mid = level_energy(c_mid);
        if (std::abs(e_mid - energy) <= 1e-10 * energy) {
          c_lo = c_hi = c_mid;
          break;
        }
        (e_mid < energy ? c_lo : c_hi) = c_mid;
      }
      const double c = 0.5 * (c_lo + c_hi);
      for (Eigen::Index i = 0; i < l; ++i) {
        m(i) = std::min(c * mag(i), std::sqrt(peak2));
      }
    }
  }
  m *= std::sqrt(energy) / m.norm();
  return m.asDiagonal() * phase;
}

AdmmQuadOperator AdmmQuadOperator::structured(MatC spatial, int code_length) {
  if (spatial.rows() != spatial.cols() || spatial.rows() == 0 || code_length < 1) {
    throw std::invalid_argument("admm quadratic: bad spatial block");
  }
  AdmmQuadOperator op;
  op.structured_ = true;
  op.n_tx_ = static_cast<int>(spatial.rows());
  op.code_length_ = code_length;
  op.spatial_ = 0.5 * (spatial + spatial.adjoint());
  const MatC& sp = op.spatial_;
  op.lambda_max_ = power_iteration_lambda_max(
      [&sp](const VecC& v) { return VecC(sp * v); }, sp.rows(), 1e-10);
  return op;
}

AdmmQuadOperator AdmmQuadOperator::dense(MatC t, int n_tx, int code_length) {
  const Eigen::Index dim = static_cast<Eigen::Index>(n_tx) * code_length;
  if (t.rows() != dim || t.cols() != dim) {
    throw std::invalid_argument("admm quadratic: dense shape mismatch");
  }
  AdmmQuadOperator op;
  op.structured_ = false;
  op.n_tx_ = n_tx;
  op.code_length_ = code_length;
  MatC sym = 0.5 * (t + t.adjoint());
  op.lambda_max_ = hermitian_eig(sym).evals.maxCoeff();
  op.dense_ = std::make_shared<const MatC>(std::move(sym));
  return op;
}

MatC AdmmQuadOperator::apply_mat(const MatC& waveform) const {
  if (waveform.rows() != n_tx_ || waveform.cols() != code_length_) {
    throw std::invalid_argument("admm quadratic: waveform shape mismatch");
  }
  if (structured_) return spatial_ * waveform;
  return unflatten((*dense_) * flatten(waveform), n_tx_, code_length_);
}

double AdmmQuadOperator::quad_mat(const MatC& waveform) const {
  return std::real(flatten(waveform).dot(flatten(apply_mat(waveform))));
}

AdmmQuadOperator make_admm_quadratic(const Scenario& scn, const QuadFormOperator& m_op) {
  scn.validate();
  const MatC a = steering_matrix(scn.geom, scn.dirs);
  if (m_op.structured()) {
    const VecC& a_t = m_op.kron_vector();
    MatC spatial = a * a.adjoint() + m_op.kron_coeff() * (a_t * a_t.adjoint());
    return AdmmQuadOperator::structured(std::move(spatial), scn.code_length());
  }
  const int l = scn.code_length();
  MatC t = m_op.dense();
  const MatC block = a * a.adjoint();
  for (int slot = 0; slot < l; ++slot) {
    t.block(slot * scn.geom.n_tx, slot * scn.geom.n_tx, scn.geom.n_tx,
            scn.geom.n_tx) += block;
  }
  return AdmmQuadOperator::dense(std::move(t), scn.geom.n_tx, l);
}

MmResult mm_inner_solve(const AdmmQuadOperator& t_op, const MatC& t_mat, MatC start,
                        const PaprConstraint& constraint, const MmOptions& opts) {
  const int n_tx = t_op.n_tx();
  const int l = t_op.code_length();
  constraint.validate(l);
  if (start.rows() != n_tx || start.cols() != l || t_mat.rows() != n_tx ||
      t_mat.cols() != l) {
    throw std::invalid_argument("mm_inner_solve: shape mismatch");
  }
  const double lambda_max = t_op.lambda_max();
  const auto objective = [&](const MatC& s) {
    return t_op.quad_mat(s) - 2.0 * std::real(flatten(t_mat).dot(flatten(s)));
  };

  MatC s = std::move(start);
  double f_prev = objective(s);
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    const MatC t_bar = t_mat - (t_op.apply_mat(s) - lambda_max * s);
    for (int n = 0; n < n_tx; ++n) {
      const VecC row = t_bar.row(n).transpose();
      s.row(n) =
          papr_project(row, constraint.per_antenna_energy, constraint.rho).transpose();
    }
    const double f_new = objective(s);
    if (f_new > f_prev + 1e-9 * std::max(1.0, std::abs(f_prev))) {
      throw std::logic_error("mm_inner_solve: majorize-minimize objective increased");
    }
    const bool converged = std::abs(f_new - f_prev) <=
                           opts.rel_tol * std::max(std::abs(f_prev), 1e-300);
    f_prev = f_new;
    if (converged) {
      ++it;
      break;
    }
  }
  return {std::move(s), f_prev, it};
}

AdmmSolution admm_solve(const Scenario& scn, const QuadFormOperator& m_op,
                        const QuadFormOperator& m_r_op, const MatchingTolerances& tol,
                        const PaprConstraint& constraint, const AdmmOptions& opts) {
  const double t_start = now_seconds();
  scn.validate();
  const int n_tx = scn.geom.n_tx;
  const int n0 = scn.n_dirs();
  const int l = scn.code_length();
  constraint.validate(l);
  tol.validate(n0);
  if (!(opts.mu > 2.0)) {
    throw std::invalid_argument("admm_solve: penalty mu must be > 2");
  }
  if (m_op.n_tx() != n_tx || m_op.code_length() != l || m_r_op.n_tx() != n_tx ||
      m_r_op.code_length() != l) {
    throw std::invalid_argument("admm_solve: operator dimensions do not match scenario");
  }

  const MatC a = steering_matrix(scn.geom, scn.dirs);
  const AdmmQuadOperator t_op = make_admm_quadratic(scn, m_op);

  // Random constant-modulus start (also feasible for rho > 1).
  Rng rng(opts.seed);
  const double a_s = std::sqrt(constraint.per_antenna_energy / static_cast<double>(l));
  MatC s(n_tx, l);
  for (int n = 0; n < n_tx; ++n) {
    for (int col = 0; col < l; ++col) {
      s(n, col) = std::polar(a_s, 2.0 * pi * rng.uniform());
    }
  }

  MatC y = MatC::Zero(n0, l);      // row k = y_k
  MatC gamma = MatC::Zero(n0, l);  // row k = gamma_k
  MatC v = MatC::Zero(n_tx, l);
  MatC lambda = MatC::Zero(n_tx, l);

  AdmmSolution sol;
  SolverReport& rep = sol.report;
  rep.solver = "papr-admm";
  rep.seed = opts.seed;
  rep.sinr_receive = m_op.structured() ? m_op.kron_coeff()
                                       : std::numeric_limits<double>::quiet_NaN();

  std::vector<std::vector<double>> resid_history(n0);
  std::vector<int> consecutive_violation(n0, 0);

  double sinr_prev = std::numeric_limits<double>::quiet_NaN();
  int outer = 0;
  bool converged = false;
  for (; outer < opts.max_outer && !converged; ++outer) {
    // s-update: t = sum_k G_k (y_k + d_k + gamma_k) + M_r (v + lambda)
    MatC t_mat = m_r_op.apply_mat(v + lambda);
    for (int k = 0; k < n0; ++k) {
      t_mat += a.col(k) * (y.row(k) + scn.desired.row(k) + gamma.row(k));
    }
    MmResult inner = mm_inner_solve(t_op, t_mat, std::move(s), constraint, opts.inner);
    s = std::move(inner.waveform);
    rep.inner_iterations_total += inner.iterations;

    const MatC emitted = a.adjoint() * s;  // row k = a_k† S

    // y-update: ball projection of z_k
    for (int k = 0; k < n0; ++k) {
      const Eigen::RowVectorXcd z = emitted.row(k) - scn.desired.row(k) - gamma.row(k);
      const double nz = z.norm();
      const double shrink = nz > 0.0 ? std::min(std::sqrt(tol.eps[k]) / nz, 1.0) : 1.0;
      y.row(k) = shrink * z;
    }

    // v/t-update
    const MatC m_r_s = m_r_op.apply_mat(s);
    const MatC z_bar = m_r_s - lambda;
    v = (opts.mu / (opts.mu - 2.0)) * z_bar;

    // dual ascent
    for (int k = 0; k < n0; ++k) {
      gamma.row(k) += y.row(k) - emitted.row(k) + scn.desired.row(k);
    }
    lambda += v - m_r_s;

    const double sinr = m_op.quad_mat(s);
    bool feasible = true;
    IterationRecord rec;
    rec.iteration = outer + 1;
    rec.sinr = sinr;
    rec.inner_objective = inner.objective;
    rec.inner_iterations = inner.iterations;
    rec.primal_residual_sinr = (v - m_r_s).norm();
    rec.matching_residuals.resize(n0);
    double worst_match = 0.0;
    for (int k = 0; k < n0; ++k) {
      const double r2 = (emitted.row(k) - scn.desired.row(k)).squaredNorm();
      rec.matching_residuals[k] = r2;
      feasible = feasible && r2 <= tol.eps[k] * (1.0 + 1e-3);
      worst_match = std::max(
          worst_match, (y.row(k) - emitted.row(k) + scn.desired.row(k)).norm());
    }
    rec.primal_residual_match = worst_match;
    if (opts.record_trace) rep.trace.push_back(rec);

    // Stop on an insignificant SINR change once the matching balls hold.
    if (outer >= 1 && feasible && sinr_prev > 0.0 &&
        std::abs(sinr - sinr_prev) < opts.sinr_rel_tol * sinr_prev) {
      converged = true;
    }
    sinr_prev = sinr;

    // Infeasibility: a matching residual that stays above its tolerance for
    // a full window without meaningful progress will not come down.
    for (int k = 0; k < n0; ++k) {
      const double r2 = rec.matching_residuals[k];
      resid_history[k].push_back(r2);
      if (r2 > tol.eps[k] * (1.0 + 1e-3)) {
        ++consecutive_violation[k];
      } else {
        consecutive_violation[k] = 0;
      }
      if (consecutive_violation[k] >= opts.plateau_window) {
        const double old =
            resid_history[k][resid_history[k].size() - opts.plateau_window];
        if (r2 >= old * (1.0 - 1e-3)) {
          char buf[192];
          std::snprintf(buf, sizeof(buf),
                        "infeasible matching tolerance: residual %.3e for direction %d "
                        "stalled above eps=%.3e for %d iterations; increase the "
                        "matching tolerance to make the problem feasible",
                        r2, k, tol.eps[k], opts.plateau_window);
          throw infeasible_error(buf);
        }
      }
    }
  }

  sol.waveform = s;
  rep.converged = converged;
  rep.iterations = outer;
  rep.sinr_total = m_op.quad_mat(s);
  if (m_op.structured()) rep.sinr_transmit = rep.sinr_total / m_op.kron_coeff();
  rep.energy = s.squaredNorm();
  const MatC emitted = a.adjoint() * s;
  rep.matching_residuals.resize(n0);
  for (int k = 0; k < n0; ++k) {
    rep.matching_residuals[k] = (emitted.row(k) - scn.desired.row(k)).squaredNorm();
  }
  rep.equality_residual = (emitted - scn.desired).norm();
  rep.papr_max = 0.0;
  for (int n = 0; n < n_tx; ++n) {
    rep.papr_max = std::max(rep.papr_max, papr_of(s.row(n).transpose()));
  }
  rep.runtime_seconds = now_seconds() - t_start;
  return sol;
}

}  // namespace mfrf
