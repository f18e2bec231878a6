// SPDX-License-Identifier: Apache-2.0
#include "mfrf/signals_eval.hpp"

#include <algorithm>

#include "mfrf/numerics.hpp"
#include "mfrf/rng.hpp"

namespace mfrf {
namespace {

// Moments and KS deviation of one part against a fitted normal.
struct PartStats {
  double skewness;
  double excess_kurtosis;
  double ks;
  std::vector<std::pair<double, double>> qq;
};

PartStats part_stats(const VecD& x) {
  const Eigen::Index n = x.size();
  const double mean = x.mean();
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = x(i) - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);
  const double sd = std::sqrt(m2);

  std::vector<double> z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = (x(i) - mean) / sd;
  std::sort(z.begin(), z.end());

  PartStats st;
  st.skewness = m3 / (sd * sd * sd);
  st.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  st.ks = 0.0;
  st.qq.reserve(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double phi = 0.5 * std::erfc(-z[i] / std::sqrt(2.0));
    const double hi = (static_cast<double>(i) + 1.0) / static_cast<double>(n);
    const double lo = static_cast<double>(i) / static_cast<double>(n);
    st.ks = std::max(st.ks, std::max(hi - phi, phi - lo));
    st.qq.emplace_back(
        z[i], normal_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(n)));
  }
  return st;
}

}  // namespace

void DesiredSignalSpec::validate() const {
  if (length < 1) throw std::invalid_argument("desired signal: length must be >= 1");
  if (kind == Kind::psk) {
    if (order < 2) throw std::invalid_argument("desired signal: PSK order must be >= 2");
    if (!(amplitude > 0.0)) {
      throw std::invalid_argument("desired signal: PSK amplitude must be > 0");
    }
  } else if (!(variance > 0.0)) {
    throw std::invalid_argument("desired signal: noise variance must be > 0");
  }
}

VecC generate_desired(const DesiredSignalSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  VecC d(spec.length);
  if (spec.kind == DesiredSignalSpec::Kind::psk) {
    for (int l = 0; l < spec.length; ++l) {
      const auto symbol = static_cast<uint64_t>(rng.uniform() * spec.order);
      const double angle =
          2.0 * pi * static_cast<double>(symbol % spec.order) / spec.order;
      d(l) = std::polar(spec.amplitude, angle);
    }
  } else {
    for (int l = 0; l < spec.length; ++l) d(l) = rng.cnormal(spec.variance);
  }
  return d;
}

std::vector<cxd> psk_constellation(int order, double amplitude) {
  if (order < 2) throw std::invalid_argument("psk_constellation: order must be >= 2");
  std::vector<cxd> points(order);
  for (int k = 0; k < order; ++k) {
    points[k] = std::polar(amplitude, 2.0 * pi * k / order);
  }
  return points;
}

double detection_probability(const DetectionSpec& spec) {
  if (!(spec.p_fa > 0.0 && spec.p_fa < 1.0)) {
    throw std::invalid_argument("detection_probability: P_FA must lie in (0, 1)");
  }
  if (!(spec.sinr >= 0.0)) {
    throw std::invalid_argument("detection_probability: SINR must be >= 0");
  }
  return 0.5 * std::erfc(erfc_inv(2.0 * spec.p_fa) - std::sqrt(spec.sinr));
}

double comm_sinr(const Scenario& scn, const MatC& waveform, int receiver_index,
                 double noise_power) {
  scn.validate();
  if (receiver_index < 0 || receiver_index >= scn.n_comm) {
    throw std::invalid_argument("comm_sinr: receiver index out of range");
  }
  if (!(noise_power > 0.0)) {
    throw std::invalid_argument("comm_sinr: noise power must be > 0");
  }
  const VecC a = tx_steering(scn.geom, scn.dirs.angles_deg[receiver_index]);
  const Eigen::RowVectorXcd emitted = a.adjoint() * waveform;
  const double l = static_cast<double>(scn.code_length());
  const double signal_power = scn.desired.row(receiver_index).squaredNorm() / l;
  const double interference =
      (emitted - scn.desired.row(receiver_index)).squaredNorm() / l;
  return signal_power / (interference + noise_power);
}

double sum_rate(const Scenario& scn, const MatC& waveform,
                const std::vector<double>& noise_powers) {
  if (static_cast<int>(noise_powers.size()) != scn.n_comm) {
    throw std::invalid_argument("sum_rate: one noise power per communication receiver");
  }
  double rate = 0.0;
  for (int n = 0; n < scn.n_comm; ++n) {
    rate += std::log2(1.0 + comm_sinr(scn, waveform, n, noise_powers[n]));
  }
  return rate;
}

JammingPower jamming_power(const Scenario& scn, const MatC& waveform, int jam_index,
                           double eps) {
  scn.validate();
  if (jam_index < 0 || jam_index >= scn.n_jam()) {
    throw std::invalid_argument("jamming_power: jam index out of range");
  }
  if (!(eps >= 0.0)) throw std::invalid_argument("jamming_power: eps must be >= 0");
  const int row = scn.n_comm + jam_index;
  const VecC a = tx_steering(scn.geom, scn.dirs.angles_deg[row]);
  JammingPower out;
  out.power = (waveform.transpose() * a.conjugate()).squaredNorm();
  const double d_norm = scn.desired.row(row).norm();
  const double root_eps = std::sqrt(eps);
  out.lower = std::pow(std::max(d_norm - root_eps, 0.0), 2);
  out.upper = std::pow(d_norm + root_eps, 2);
  out.bounds_reliable = eps < d_norm * d_norm;
  return out;
}

std::vector<SerPoint> ser_monte_carlo(const VecC& tx_signal,
                                      const std::vector<cxd>& constellation,
                                      const std::vector<double>& snr_grid_db,
                                      long trials, uint64_t seed,
                                      const SerOptions& options) {
  const Eigen::Index l = tx_signal.size();
  if (l == 0) throw std::invalid_argument("ser_monte_carlo: empty signal");
  if (constellation.size() < 2) {
    throw std::invalid_argument("ser_monte_carlo: constellation order must be >= 2");
  }
  if (trials < 1) throw std::invalid_argument("ser_monte_carlo: trials must be >= 1");
  const VecC& truth = options.truth ? *options.truth : tx_signal;
  if (truth.size() != l) {
    throw std::invalid_argument("ser_monte_carlo: truth length mismatch");
  }
  if (options.jam_signal && options.jam_signal->size() != l) {
    throw std::invalid_argument("ser_monte_carlo: jam signal length mismatch");
  }

  const auto nearest = [&](cxd y) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < constellation.size(); ++i) {
      const double d = std::norm(y - constellation[i]);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    return best;
  };

  std::vector<int> truth_symbols(l);
  for (Eigen::Index i = 0; i < l; ++i) truth_symbols[i] = nearest(truth(i));

  double constellation_power = 0.0;
  for (const cxd& c : constellation) constellation_power += std::norm(c);
  constellation_power /= static_cast<double>(constellation.size());

  const Rng base(seed);
  std::vector<SerPoint> out;
  out.reserve(snr_grid_db.size());
  for (size_t pt = 0; pt < snr_grid_db.size(); ++pt) {
    const double noise_power = constellation_power / db2lin(snr_grid_db[pt]);
    VecC jam = VecC::Zero(l);
    if (options.jam_signal) {
      const double jam_power = options.jam_signal->squaredNorm() / static_cast<double>(l);
      if (jam_power > 0.0) {
        const double target = db2lin(options.jnr_db) * noise_power;
        jam = std::sqrt(target / jam_power) * (*options.jam_signal);
      }
    }
    long errors = 0;
    for (long trial = 0; trial < trials; ++trial) {
      Rng rng = base.substream(pt, static_cast<uint64_t>(trial));
      for (Eigen::Index i = 0; i < l; ++i) {
        const cxd received = tx_signal(i) + jam(i) + rng.cnormal(noise_power);
        if (nearest(received) != truth_symbols[i]) ++errors;
      }
    }
    const long decisions = trials * static_cast<long>(l);
    const double ser = static_cast<double>(errors) / static_cast<double>(decisions);
    SerPoint point;
    point.snr_db = snr_grid_db[pt];
    point.ser = ser;
    point.std_error = std::sqrt(ser * (1.0 - ser) / static_cast<double>(decisions));
    point.errors = errors;
    point.decisions = decisions;
    out.push_back(point);
  }
  return out;
}

NormalityReport normality_check(const VecC& signal) {
  const Eigen::Index n = signal.size();
  if (n < 32) throw std::invalid_argument("normality_check: need at least 32 samples");
  const PartStats re = part_stats(signal.real());
  const PartStats im = part_stats(signal.imag());
  NormalityReport rep;
  rep.skewness_re = re.skewness;
  rep.skewness_im = im.skewness;
  rep.excess_kurtosis_re = re.excess_kurtosis;
  rep.excess_kurtosis_im = im.excess_kurtosis;
  rep.qq_deviation_re = re.ks;
  rep.qq_deviation_im = im.ks;
  rep.qq_re = re.qq;
  rep.qq_im = im.qq;
  const double gate = 4.0 / std::sqrt(static_cast<double>(n));
  rep.pass = std::abs(rep.excess_kurtosis_re) < 1.0 &&
             std::abs(rep.excess_kurtosis_im) < 1.0 && rep.qq_deviation_re < gate &&
             rep.qq_deviation_im < gate;
  return rep;
}

}  // namespace mfrf
