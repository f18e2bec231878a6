// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "mfrf/common.hpp"

namespace mfrf {

/// Uniform linear arrays on both ends of the link. Spacings are in
/// wavelengths (d/lambda). Steering vectors have unit-modulus entries,
/// so ||a(theta)||^2 = n_tx and ||b(theta)||^2 = n_rx exactly.
struct ArrayGeometry {
  int n_tx = 1;
  int n_rx = 1;
  double tx_spacing = 0.5;
  double rx_spacing = 0.5;

  void validate() const;
};

/// Ordered constrained directions (communication receivers first, then
/// hostile targets), in degrees, each inside (-90, 90), all distinct.
struct DirectionSet {
  std::vector<double> angles_deg;

  int size() const { return static_cast<int>(angles_deg.size()); }
  void validate() const;
};

/// Transmit steering vector a(theta); element m (0-based) is
/// exp(i 2 pi d (m) sin theta), broadside convention, first element as
/// phase reference.
VecC tx_steering(const ArrayGeometry& geom, double theta_deg);

/// Receive steering vector b(theta).
VecC rx_steering(const ArrayGeometry& geom, double theta_deg);

/// A = [a(theta_1), ..., a(theta_N0)], columns in direction order.
MatC steering_matrix(const ArrayGeometry& geom, const DirectionSet& dirs);

/// Normalized transmit beampattern B(theta_point, theta_eval)
/// = a†(theta_eval) a(theta_point) / n_tx. |B| is the normalized gain in [0, 1].
cxd normalized_beampattern(const ArrayGeometry& geom, double theta_point_deg,
                           double theta_eval_deg);

double beampattern_gain(const ArrayGeometry& geom, double theta_point_deg,
                        double theta_eval_deg);

/// Target channel lift H(theta) = I_L ⊗ b(theta) a†(theta), applied
/// slot-by-slot without materializing the Kronecker product. The dense
/// form exists only for small test oracles.
class LiftedTarget {
public:
  LiftedTarget(const ArrayGeometry& geom, double theta_deg, int code_length);

  /// H s for s = vec(S), S of size n_tx x L. Returns vec(b a† S).
  VecC apply(const VecC& s) const;
  MatC apply_mat(const MatC& waveform) const;  // b (a† S)
  VecC apply_adjoint(const VecC& y) const;     // H† y

  MatC materialize() const;

  int code_length() const { return code_length_; }
  const VecC& tx_vector() const { return a_; }
  const VecC& rx_vector() const { return b_; }

private:
  VecC a_;
  VecC b_;
  int code_length_;
};

/// Direction lift G(theta) = I_L ⊗ a(theta); G†(theta) vec(S) is the
/// length-L signal emitted toward theta.
class LiftedDirection {
public:
  LiftedDirection(const ArrayGeometry& geom, double theta_deg, int code_length);

  VecC apply(const VecC& y) const;          // G y, y of length L
  VecC apply_adjoint(const VecC& s) const;  // G† s, s = vec(S)
  VecC emitted(const MatC& waveform) const; // (a† S)ᵀ as a column

  MatC materialize() const;

  int code_length() const { return code_length_; }
  const VecC& tx_vector() const { return a_; }

private:
  VecC a_;
  int code_length_;
};

}  // namespace mfrf
