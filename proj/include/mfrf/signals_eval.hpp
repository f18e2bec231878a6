// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "mfrf/energy_solver.hpp"

namespace mfrf {

/// Desired per-direction signal: PSK symbols of a given amplitude, or a
/// circular complex Gaussian noise-like sequence. Deterministic given seed.
struct DesiredSignalSpec {
  enum class Kind { psk, noise_like };

  Kind kind = Kind::psk;
  int order = 8;           // psk only
  double amplitude = 1.0;  // psk only
  double variance = 1.0;   // noise_like only
  int length = 1;
  uint64_t seed = 0;

  void validate() const;
};

VecC generate_desired(const DesiredSignalSpec& spec);

std::vector<cxd> psk_constellation(int order, double amplitude);

struct DetectionSpec {
  double p_fa;  // in (0, 1)
  double sinr;  // linear, >= 0
};

/// Closed-form detection probability of the threshold detector:
/// 0.5 erfc(erfc^{-1}(2 P_FA) - sqrt(SINR)). Strictly increasing in SINR.
double detection_probability(const DetectionSpec& spec);

/// Per-receiver SINR with the expectation taken as a per-slot sample mean:
/// mean|d|^2 / (mean matching error + noise). receiver_index is 0-based.
double comm_sinr(const Scenario& scn, const MatC& waveform, int receiver_index,
                 double noise_power);

/// Achievable sum rate sum_n log2(1 + chi_n).
double sum_rate(const Scenario& scn, const MatC& waveform,
                const std::vector<double>& noise_powers);

struct JammingPower {
  double power;           // ||S^T a*(theta)||^2
  double lower;           // (||d|| - sqrt(eps))^2, clamped at 0
  double upper;           // (||d|| + sqrt(eps))^2
  bool bounds_reliable;   // false when eps >= ||d||^2
};

/// Energy delivered toward the jam_index-th hostile direction (0-based)
/// with triangle-inequality bounds for a matching tolerance eps.
JammingPower jamming_power(const Scenario& scn, const MatC& waveform, int jam_index,
                           double eps);

struct SerPoint {
  double snr_db;
  double ser;
  double std_error;
  long errors;
  long decisions;
};

struct SerOptions {
  /// Signal whose nearest-constellation symbols are the ground truth;
  /// defaults to the transmitted signal itself.
  std::optional<VecC> truth;
  /// Additive interference sequence, scaled to the given jammer-to-noise
  /// ratio (jam power over noise power at the victim).
  std::optional<VecC> jam_signal;
  double jnr_db = 0.0;
};

/// Monte Carlo symbol error rate of minimum-distance detection of
/// tx_signal in CN noise (optionally plus a scaled jamming sequence),
/// per SNR grid point. Per-trial substreams: trial counts never change
/// earlier trials.
std::vector<SerPoint> ser_monte_carlo(const VecC& tx_signal,
                                      const std::vector<cxd>& constellation,
                                      const std::vector<double>& snr_grid_db,
                                      long trials, uint64_t seed,
                                      const SerOptions& options = {});

struct NormalityReport {
  double skewness_re, skewness_im;
  double excess_kurtosis_re, excess_kurtosis_im;
  double qq_deviation_re, qq_deviation_im;  // CDF-domain (KS) deviation
  bool pass;
  std::vector<std::pair<double, double>> qq_re;  // (sample, theoretical) quantiles
  std::vector<std::pair<double, double>> qq_im;
};

/// Gaussianity diagnostics of real and imaginary parts separately.
/// Pass gate: |excess kurtosis| < 1 and KS deviation < 4/sqrt(L).
NormalityReport normality_check(const VecC& signal);

}  // namespace mfrf
