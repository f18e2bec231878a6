// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <vector>

#include "mfrf/array_model.hpp"
#include "mfrf/common.hpp"
#include "mfrf/numerics.hpp"

namespace mfrf {

/// Disturbance dominated by internal white noise plus external jammers:
/// the full covariance is I_L ⊗ R̄ with
/// R̄ = sigma^2 I + sum_n p_n b(theta_n) b†(theta_n). Never materialized
/// for large L.
struct StructuredCovariance {
  struct Jammer {
    double angle_deg = 0.0;
    double power = 1.0;  // linear
  };

  double noise_power = 1.0;  // sigma^2
  std::vector<Jammer> jammers;
  int code_length = 1;  // L

  void validate() const;
};

/// Dense Hermitian positive definite covariance of vec(N), size
/// (L n_rx) x (L n_rx). Validated and factorized at construction.
class GeneralCovariance {
public:
  explicit GeneralCovariance(MatC r);

  const MatC& matrix() const { return r_; }
  Eigen::Index dim() const { return r_.rows(); }
  MatC solve(const MatC& rhs) const { return llt_.solve(rhs); }
  double cond() const { return cond_; }

private:
  MatC r_;
  Eigen::LLT<MatC> llt_;
  double cond_ = 0.0;
};

/// R̄ for a structured model.
MatC spatial_covariance(const StructuredCovariance& model, const ArrayGeometry& geom);

/// b†(theta_t) R̄^{-1} b(theta_t); equals n_rx / sigma^2 with no jammers.
double receive_sinr(const StructuredCovariance& model, const ArrayGeometry& geom,
                    double theta_t_deg);

/// I_L ⊗ R̄ as a GeneralCovariance (test oracle; guarded size).
GeneralCovariance materialize_full(const StructuredCovariance& model,
                                   const ArrayGeometry& geom);

/// Hermitian PSD operator on C^{L n_tx}. Two shapes:
///  - structured: I_L ⊗ (coeff · a a†), applied slot-by-slot;
///  - general: dense with a cached eigendecomposition.
/// M = H† R^{-1} H and its square root M_r both live here.
class QuadFormOperator {
public:
  VecC apply(const VecC& s) const;
  MatC apply_mat(const MatC& waveform) const;
  double quad(const VecC& s) const { return quad_mat(unflatten(s, n_tx_, code_length_)); }
  double quad_mat(const MatC& waveform) const;

  double lambda_max() const;
  QuadFormOperator sqrt() const;
  MatC materialize() const;

  bool structured() const { return structured_; }
  int n_tx() const { return n_tx_; }
  int code_length() const { return code_length_; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(n_tx_) * code_length_; }

  // Structured accessors.
  double kron_coeff() const;
  const VecC& kron_vector() const;

  // General accessors.
  const MatC& dense() const;
  const HermEig& eig() const;

  static QuadFormOperator make_structured(VecC a, double coeff, int code_length);
  static QuadFormOperator make_general(MatC m, int n_tx, int code_length);

private:
  QuadFormOperator() = default;

  bool structured_ = true;
  int n_tx_ = 0;
  int code_length_ = 0;
  VecC a_;
  double coeff_ = 0.0;
  std::shared_ptr<const MatC> dense_;
  std::shared_ptr<const HermEig> eig_;
};

/// M = I_L ⊗ (SINR_R a(theta_t) a†(theta_t)) for the structured model.
QuadFormOperator make_quadratic_form(const StructuredCovariance& model,
                                     const ArrayGeometry& geom, double theta_t_deg,
                                     int code_length);

/// M = H†(theta_t) R^{-1} H(theta_t) via a PD solve; materializes M and is
/// therefore size-guarded (L n_tx <= 1024).
QuadFormOperator make_quadratic_form(const GeneralCovariance& cov,
                                     const ArrayGeometry& geom, double theta_t_deg,
                                     int code_length);

}  // namespace mfrf
