// SPDX-License-Identifier: Apache-2.0
#include "mfrf/disturbance.hpp"

#include <cstdio>

namespace mfrf {
namespace {

constexpr Eigen::Index kGeneralPathMaxDim = 1024;  // cap on L * n_tx

std::string format_cond(double cond) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3e", cond);
  return buf;
}

}  // namespace

void StructuredCovariance::validate() const {
  if (!(noise_power > 0.0)) {
    throw std::invalid_argument("structured covariance: noise power must be > 0");
  }
  for (const auto& j : jammers) {
    if (!(j.power > 0.0)) {
      throw std::invalid_argument("structured covariance: jammer power must be > 0");
    }
    if (!(j.angle_deg > -90.0 && j.angle_deg < 90.0)) {
      throw std::invalid_argument("structured covariance: jammer angle outside (-90, 90)");
    }
  }
  if (code_length < 1) {
    throw std::invalid_argument("structured covariance: code length must be >= 1");
  }
}

GeneralCovariance::GeneralCovariance(MatC r) : r_(std::move(r)) {
  if (r_.rows() != r_.cols() || r_.rows() == 0) {
    throw std::invalid_argument("general covariance: matrix must be square and nonempty");
  }
  const double scale = r_.norm();
  if ((r_ - r_.adjoint()).norm() > 1e-10 * std::max(1.0, scale)) {
    throw std::invalid_argument("general covariance: matrix is not Hermitian");
  }
  r_ = 0.5 * (r_ + r_.adjoint()).eval();
  const Eigen::SelfAdjointEigenSolver<MatC> es(r_, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) {
    throw numerical_error("general covariance: not positive definite (min eigenvalue " +
                          std::to_string(lo) + ")");
  }
  cond_ = hi / lo;
  if (cond_ > 1e14) {
    throw numerical_error("general covariance: near-singular, condition number " +
                          format_cond(cond_));
  }
  llt_.compute(r_);
  if (llt_.info() != Eigen::Success) {
    throw numerical_error("general covariance: Cholesky factorization failed, condition number " +
                          format_cond(cond_));
  }
}

MatC spatial_covariance(const StructuredCovariance& model, const ArrayGeometry& geom) {
  model.validate();
  MatC r = model.noise_power * MatC::Identity(geom.n_rx, geom.n_rx);
  for (const auto& j : model.jammers) {
    const VecC b = rx_steering(geom, j.angle_deg);
    r += j.power * (b * b.adjoint());
  }
  return r;
}

double receive_sinr(const StructuredCovariance& model, const ArrayGeometry& geom,
                    double theta_t_deg) {
  const MatC rbar = spatial_covariance(model, geom);
  const VecC b = rx_steering(geom, theta_t_deg);
  const VecC x = Eigen::LLT<MatC>(rbar).solve(b);
  return std::real(b.dot(x));
}

GeneralCovariance materialize_full(const StructuredCovariance& model,
                                   const ArrayGeometry& geom) {
  const Eigen::Index dim = static_cast<Eigen::Index>(model.code_length) * geom.n_rx;
  if (dim > kGeneralPathMaxDim) {
    throw std::logic_error("materialize_full: covariance too large to materialize");
  }
  const MatC rbar = spatial_covariance(model, geom);
  MatC r = MatC::Zero(dim, dim);
  for (int l = 0; l < model.code_length; ++l) {
    r.block(l * geom.n_rx, l * geom.n_rx, geom.n_rx, geom.n_rx) = rbar;
  }
  return GeneralCovariance(std::move(r));
}

QuadFormOperator QuadFormOperator::make_structured(VecC a, double coeff,
                                                   int code_length) {
  if (a.size() == 0 || code_length < 1) {
    throw std::invalid_argument("quadratic form: empty steering vector or code length");
  }
  if (coeff < 0.0) {
    throw std::invalid_argument("quadratic form: negative coefficient");
  }
  QuadFormOperator op;
  op.structured_ = true;
  op.n_tx_ = static_cast<int>(a.size());
  op.code_length_ = code_length;
  op.a_ = std::move(a);
  op.coeff_ = coeff;
  return op;
}

QuadFormOperator QuadFormOperator::make_general(MatC m, int n_tx, int code_length) {
  const Eigen::Index dim = static_cast<Eigen::Index>(n_tx) * code_length;
  if (m.rows() != dim || m.cols() != dim) {
    throw std::invalid_argument("quadratic form: dense matrix shape mismatch");
  }
  QuadFormOperator op;
  op.structured_ = false;
  op.n_tx_ = n_tx;
  op.code_length_ = code_length;
  MatC sym = 0.5 * (m + m.adjoint());
  op.eig_ = std::make_shared<const HermEig>(hermitian_eig(sym));
  op.dense_ = std::make_shared<const MatC>(std::move(sym));
  return op;
}

MatC QuadFormOperator::apply_mat(const MatC& waveform) const {
  if (waveform.rows() != n_tx_ || waveform.cols() != code_length_) {
    throw std::invalid_argument("quadratic form: waveform shape mismatch");
  }
  if (structured_) {
    return coeff_ * (a_ * (a_.adjoint() * waveform));
  }
  const VecC s = flatten(waveform);
  return unflatten((*dense_) * s, n_tx_, code_length_);
}

VecC QuadFormOperator::apply(const VecC& s) const {
  return flatten(apply_mat(unflatten(s, n_tx_, code_length_)));
}

double QuadFormOperator::quad_mat(const MatC& waveform) const {
  if (structured_) {
    if (waveform.rows() != n_tx_ || waveform.cols() != code_length_) {
      throw std::invalid_argument("quadratic form: waveform shape mismatch");
    }
    return coeff_ * (a_.adjoint() * waveform).squaredNorm();
  }
  const VecC s = flatten(waveform);
  return std::real(s.dot((*dense_) * s));
}

double QuadFormOperator::lambda_max() const {
  if (structured_) return coeff_ * static_cast<double>(n_tx_);
  return eig_->evals.maxCoeff();
}

QuadFormOperator QuadFormOperator::sqrt() const {
  if (structured_) {
    // (c a a†)^{1/2} = sqrt(c / n_tx) a a† since ||a||^2 = n_tx.
    return make_structured(a_, std::sqrt(coeff_ / static_cast<double>(n_tx_)),
                           code_length_);
  }
  const double lmax = eig_->evals.maxCoeff();
  VecD clamped = eig_->evals;
  for (Eigen::Index i = 0; i < clamped.size(); ++i) {
    if (clamped(i) < 0.0) {
      if (clamped(i) < -1e-10 * std::max(lmax, 0.0)) {
        throw numerical_error("operator square root: eigenvalue " +
                              std::to_string(clamped(i)) + " below PSD tolerance");
      }
      clamped(i) = 0.0;
    }
  }
  const MatC root =
      eig_->evecs * clamped.cwiseSqrt().asDiagonal() * eig_->evecs.adjoint();
  return make_general(root, n_tx_, code_length_);
}

MatC QuadFormOperator::materialize() const {
  if (!structured_) return *dense_;
  if (dim() > kGeneralPathMaxDim) {
    throw std::logic_error("quadratic form: too large to materialize; use apply()");
  }
  const MatC block = coeff_ * (a_ * a_.adjoint());
  MatC m = MatC::Zero(dim(), dim());
  for (int l = 0; l < code_length_; ++l) {
    m.block(l * n_tx_, l * n_tx_, n_tx_, n_tx_) = block;
  }
  return m;
}

double QuadFormOperator::kron_coeff() const {
  if (!structured_) throw std::logic_error("quadratic form: not structured");
  return coeff_;
}

const VecC& QuadFormOperator::kron_vector() const {
  if (!structured_) throw std::logic_error("quadratic form: not structured");
  return a_;
}

const MatC& QuadFormOperator::dense() const {
  if (structured_) throw std::logic_error("quadratic form: not dense");
  return *dense_;
}

const HermEig& QuadFormOperator::eig() const {
  if (structured_) throw std::logic_error("quadratic form: not dense");
  return *eig_;
}

QuadFormOperator make_quadratic_form(const StructuredCovariance& model,
                                     const ArrayGeometry& geom, double theta_t_deg,
                                     int code_length) {
  const double sinr_r = receive_sinr(model, geom, theta_t_deg);
  return QuadFormOperator::make_structured(tx_steering(geom, theta_t_deg), sinr_r,
                                           code_length);
}

QuadFormOperator make_quadratic_form(const GeneralCovariance& cov,
                                     const ArrayGeometry& geom, double theta_t_deg,
                                     int code_length) {
  const Eigen::Index dim = static_cast<Eigen::Index>(code_length) * geom.n_tx;
  if (dim > kGeneralPathMaxDim) {
    throw numerical_error(
        "general covariance path materializes M and is limited to L*n_tx <= 1024; "
        "use the structured model for larger problems");
  }
  if (cov.dim() != static_cast<Eigen::Index>(code_length) * geom.n_rx) {
    throw std::invalid_argument("general covariance: dimension does not match L * n_rx");
  }
  const VecC a = tx_steering(geom, theta_t_deg);
  const VecC b = rx_steering(geom, theta_t_deg);
  const MatC block = b * a.adjoint();
  MatC h_dense = MatC::Zero(cov.dim(), dim);
  for (int l = 0; l < code_length; ++l) {
    h_dense.block(l * geom.n_rx, l * geom.n_tx, geom.n_rx, geom.n_tx) = block;
  }
  const MatC m = h_dense.adjoint() * cov.solve(h_dense);
  return QuadFormOperator::make_general(m, geom.n_tx, code_length);
}

}  // namespace mfrf
