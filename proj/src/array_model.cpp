// SPDX-License-Identifier: Apache-2.0
#include "mfrf/array_model.hpp"

#include <cstdio>

namespace mfrf {
namespace {

void check_angle(double theta_deg) {
  if (!(theta_deg > -90.0 && theta_deg < 90.0)) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "steering angle %.6g deg outside (-90, 90)",
                  theta_deg);
    throw std::invalid_argument(buf);
  }
}

VecC ula_steering(int n, double spacing, double theta_deg) {
  check_angle(theta_deg);
  const double phase_step = 2.0 * pi * spacing * std::sin(deg2rad(theta_deg));
  VecC a(n);
  for (int m = 0; m < n; ++m) {
    a(m) = std::polar(1.0, phase_step * static_cast<double>(m));
  }
  return a;
}

// Materialized Kronecker lifts are test oracles; above this length the
// implicit operators are mandatory.
constexpr int kMaterializeMaxCodeLength = 64;

}  // namespace

void ArrayGeometry::validate() const {
  if (n_tx < 1 || n_rx < 1) {
    throw std::invalid_argument("array geometry: antenna counts must be >= 1");
  }
  if (!(tx_spacing > 0.0) || !(rx_spacing > 0.0)) {
    throw std::invalid_argument("array geometry: element spacings must be > 0");
  }
}

void DirectionSet::validate() const {
  if (angles_deg.empty()) {
    throw std::invalid_argument("direction set must be nonempty");
  }
  for (double theta : angles_deg) check_angle(theta);
  for (size_t i = 0; i < angles_deg.size(); ++i) {
    for (size_t j = i + 1; j < angles_deg.size(); ++j) {
      if (std::abs(angles_deg[i] - angles_deg[j]) < 1e-9) {
        throw std::invalid_argument("direction set angles must be distinct");
      }
    }
  }
}

VecC tx_steering(const ArrayGeometry& geom, double theta_deg) {
  geom.validate();
  return ula_steering(geom.n_tx, geom.tx_spacing, theta_deg);
}

VecC rx_steering(const ArrayGeometry& geom, double theta_deg) {
  geom.validate();
  return ula_steering(geom.n_rx, geom.rx_spacing, theta_deg);
}

MatC steering_matrix(const ArrayGeometry& geom, const DirectionSet& dirs) {
  dirs.validate();
  MatC a(geom.n_tx, dirs.size());
  for (int k = 0; k < dirs.size(); ++k) {
    a.col(k) = tx_steering(geom, dirs.angles_deg[k]);
  }
  return a;
}

cxd normalized_beampattern(const ArrayGeometry& geom, double theta_point_deg,
                           double theta_eval_deg) {
  const VecC a_point = tx_steering(geom, theta_point_deg);
  const VecC a_eval = tx_steering(geom, theta_eval_deg);
  return a_eval.dot(a_point) / static_cast<double>(geom.n_tx);
}

double beampattern_gain(const ArrayGeometry& geom, double theta_point_deg,
                        double theta_eval_deg) {
  return std::abs(normalized_beampattern(geom, theta_point_deg, theta_eval_deg));
}

LiftedTarget::LiftedTarget(const ArrayGeometry& geom, double theta_deg,
                           int code_length)
    : a_(tx_steering(geom, theta_deg)),
      b_(rx_steering(geom, theta_deg)),
      code_length_(code_length) {
  if (code_length < 1) throw std::invalid_argument("code length must be >= 1");
}

MatC LiftedTarget::apply_mat(const MatC& waveform) const {
  if (waveform.rows() != a_.size() || waveform.cols() != code_length_) {
    throw std::invalid_argument("lifted target: waveform shape mismatch");
  }
  return b_ * (a_.adjoint() * waveform);
}

VecC LiftedTarget::apply(const VecC& s) const {
  return flatten(apply_mat(unflatten(s, a_.size(), code_length_)));
}

VecC LiftedTarget::apply_adjoint(const VecC& y) const {
  const MatC y_mat = unflatten(y, b_.size(), code_length_);
  return flatten(MatC(a_ * (b_.adjoint() * y_mat)));
}

MatC LiftedTarget::materialize() const {
  if (code_length_ > kMaterializeMaxCodeLength) {
    throw std::logic_error(
        "lifted target: dense form is only available at test sizes; use apply()");
  }
  const MatC block = b_ * a_.adjoint();
  MatC h = MatC::Zero(code_length_ * b_.size(), code_length_ * a_.size());
  for (int l = 0; l < code_length_; ++l) {
    h.block(l * b_.size(), l * a_.size(), b_.size(), a_.size()) = block;
  }
  return h;
}

LiftedDirection::LiftedDirection(const ArrayGeometry& geom, double theta_deg,
                                 int code_length)
    : a_(tx_steering(geom, theta_deg)), code_length_(code_length) {
  if (code_length < 1) throw std::invalid_argument("code length must be >= 1");
}

VecC LiftedDirection::apply(const VecC& y) const {
  if (y.size() != code_length_) {
    throw std::invalid_argument("lifted direction: signal length mismatch");
  }
  return flatten(MatC(a_ * y.transpose()));
}

VecC LiftedDirection::apply_adjoint(const VecC& s) const {
  return emitted(unflatten(s, a_.size(), code_length_));
}

VecC LiftedDirection::emitted(const MatC& waveform) const {
  if (waveform.rows() != a_.size() || waveform.cols() != code_length_) {
    throw std::invalid_argument("lifted direction: waveform shape mismatch");
  }
  return (a_.adjoint() * waveform).transpose();
}

MatC LiftedDirection::materialize() const {
  if (code_length_ > kMaterializeMaxCodeLength) {
    throw std::logic_error(
        "lifted direction: dense form is only available at test sizes; use apply()");
  }
  MatC g = MatC::Zero(code_length_ * a_.size(), code_length_);
  for (int l = 0; l < code_length_; ++l) {
    g.block(l * a_.size(), l, a_.size(), 1) = a_;
  }
  return g;
}

}  // namespace mfrf
