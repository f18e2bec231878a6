// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "mfrf/signals_eval.hpp"
#include "mfrf/structured_solver.hpp"
#include "test_util.hpp"

using namespace mfrf;
using namespace mfrf::testutil;

namespace {

const ArrayGeometry kGeom{12, 12, 0.5, 0.5};

Scenario paper_scenario(uint64_t seed, double e_t = 500.0, int l = 128) {
  Scenario scn;
  scn.geom = kGeom;
  scn.theta_t_deg = 0.0;
  scn.dirs = DirectionSet{{-25.0, 20.0}};
  scn.n_comm = 1;
  scn.total_energy = e_t;
  DesiredSignalSpec psk{DesiredSignalSpec::Kind::psk, 8, 1.0, 1.0, l,
                        Rng(seed).substream(1).root()};
  DesiredSignalSpec noise{DesiredSignalSpec::Kind::noise_like, 8, 1.0, 1.0, l,
                          Rng(seed).substream(2).root()};
  scn.desired = MatC(2, l);
  scn.desired.row(0) = generate_desired(psk).transpose();
  scn.desired.row(1) = generate_desired(noise).transpose();
  return scn;
}

int numerical_rank(const MatC& m) {
  const Eigen::JacobiSVD<MatC> svd(m);
  const VecD& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-8 * sv(0)) ++rank;
  }
  return rank;
}

}  // namespace

TEST_CASE("paper setup: SINR loss vs radar-only near 0.095 dB") {
  const StructuredCovariance model{1.0, {}, 128};
  const double radar_db = lin2db(500.0 * 12.0);
  double loss_sum = 0.0;
  const int n_seeds = 10;
  for (int seed = 0; seed < n_seeds; ++seed) {
    const StructuredSolution sol = solve_structured(paper_scenario(seed), model);
    loss_sum += radar_db - lin2db(sol.sinr_t);
  }
  const double loss = loss_sum / n_seeds;
  CHECK(std::abs(loss - 0.095) < 0.05);
}

TEST_CASE("structured solution invariants") {
  Rng rng(71);
  const StructuredCovariance model{1.0, {{40.0, 1.5}}, 16};
  for (int t = 0; t < 20; ++t) {
    Scenario scn;
    scn.geom = kGeom;
    scn.theta_t_deg = -5.0 + 10.0 * rng.uniform();
    scn.dirs = DirectionSet{{-25.0 - 20.0 * rng.uniform(), 20.0 + 20.0 * rng.uniform()}};
    scn.n_comm = 1;
    scn.desired = random_complex(rng, 2, 16);
    scn.total_energy = scn.desired.squaredNorm() / 3.0 + 30.0;
    const StructuredSolution sol = solve_structured(scn, model);

    // Eq-identity: recomputed transmit SINR matches (||q|| + sqrt(e)||u||)^2
    const VecC a_t = tx_steering(kGeom, scn.theta_t_deg);
    const double recomputed = (a_t.adjoint() * sol.waveform).squaredNorm();
    const double closed =
        std::pow(sol.q.norm() + std::sqrt(sol.residual_energy) * sol.u.norm(), 2);
    CHECK(recomputed == doctest::Approx(closed).epsilon(1e-10));
    CHECK(sol.sinr_t == doctest::Approx(closed).epsilon(1e-10));
    CHECK(sol.sinr_total == doctest::Approx(sol.sinr_t * sol.sinr_r).epsilon(1e-12));

    // constraints
    const MatC a = steering_matrix(kGeom, scn.dirs);
    CHECK((a.adjoint() * sol.waveform - scn.desired).norm() <=
          1e-9 * scn.desired.norm());
    CHECK(std::abs(sol.waveform.squaredNorm() - scn.total_energy) <=
          1e-10 * scn.total_energy);

    // rank and sandwich
    CHECK(numerical_rank(sol.waveform) <= 2);
    CHECK(sol.sinr_t >= sol.q.squaredNorm() - 1e-9);
    CHECK(sol.sinr_t <= scn.total_energy * 12.0 * (1.0 + 1e-12));
  }
}

TEST_CASE("structured equals general on random small instances") {
  Rng rng(73);
  for (int t = 0; t < 20; ++t) {
    const int n_tx = 3 + static_cast<int>(rng.uniform() * 4);   // 3..6
    const int n_rx = 2 + static_cast<int>(rng.uniform() * 3);   // 2..4
    const int l = 2 + static_cast<int>(rng.uniform() * 7);      // 2..8
    const int n0 = 1 + static_cast<int>(rng.uniform() * std::min(2, n_tx - 2));
    const ArrayGeometry geom{n_tx, n_rx, 0.5, 0.5};
    Scenario scn;
    scn.geom = geom;
    scn.theta_t_deg = -10.0 + 20.0 * rng.uniform();
    std::vector<double> angles;
    for (int k = 0; k < n0; ++k) angles.push_back(25.0 + 15.0 * k + 10.0 * rng.uniform());
    scn.dirs = DirectionSet{angles};
    scn.n_comm = n0 > 1 ? 1 : n0;
    scn.desired = random_complex(rng, n0, l);
    scn.total_energy = scn.desired.squaredNorm() + 10.0 + 10.0 * rng.uniform();
    StructuredCovariance model{0.5 + rng.uniform(), {}, l};
    if (rng.uniform() > 0.4) {
      model.jammers.push_back({-35.0 + 10.0 * rng.uniform(), 0.5 + 2.0 * rng.uniform()});
    }

    const StructuredSolution fast = solve_structured(scn, model);
    const QuadFormOperator m_gen =
        make_quadratic_form(materialize_full(model, geom), geom, scn.theta_t_deg, l);
    const EnergySolution slow = solve_general(scn, m_gen);
    CHECK(std::abs(fast.sinr_total - slow.report.sinr_total) <=
          1e-8 * slow.report.sinr_total);
  }
}

TEST_CASE("zero residual energy boundary returns the particular solution") {
  Rng rng(79);
  Scenario scn;
  scn.geom = kGeom;
  scn.theta_t_deg = 0.0;
  scn.dirs = DirectionSet{{-25.0, 20.0}};
  scn.n_comm = 1;
  scn.desired = random_complex(rng, 2, 8);
  scn.total_energy = 1.0;
  const MatC a = steering_matrix(kGeom, scn.dirs);
  const MatC s_hat = a * (a.adjoint() * a).inverse() * scn.desired;
  scn.total_energy = s_hat.squaredNorm() * (1.0 + 1e-14);
  const StructuredCovariance model{1.0, {}, 8};
  const StructuredSolution sol = solve_structured(scn, model);
  CHECK((sol.waveform - s_hat).norm() <= 1e-6 * s_hat.norm());
  CHECK(sol.sinr_t == doctest::Approx(sol.q.squaredNorm()).epsilon(1e-5));
}

TEST_CASE("coherent case") {
  const StructuredCovariance model{1.0, {}, 16};
  SUBCASE("matches solve_structured entrywise for a generic direction") {
    Rng rng(83);
    const ArrayGeometry geom{8, 8, 0.5, 0.5};
    for (int t = 0; t < 10; ++t) {
      Scenario scn;
      scn.geom = geom;
      scn.theta_t_deg = 0.0;
      scn.dirs = DirectionSet{{-70.0 + 140.0 * rng.uniform()}};
      if (std::abs(scn.dirs.angles_deg[0]) < 2.0) scn.dirs.angles_deg[0] += 5.0;
      scn.n_comm = 1;
      scn.desired = random_complex(rng, 1, 16);
      scn.total_energy = scn.desired.squaredNorm() + 20.0;
      const CoherentSolution coh = coherent_case(scn, model);
      const StructuredSolution direct = solve_structured(scn, model);
      const MatC w_form = coh.beamformer * scn.desired.row(0);
      CHECK((w_form - direct.waveform).norm() <= 1e-10 * direct.waveform.norm());
      CHECK((coh.solution.waveform - direct.waveform).norm() <=
            1e-10 * direct.waveform.norm());
      CHECK(numerical_rank(coh.solution.waveform) == 1);
    }
  }
  SUBCASE("beampattern null: matching and detection decouple") {
    // n_tx = 8, d = 0.5, target at 0: nulls at sin(theta) = k/4
    const ArrayGeometry geom{8, 8, 0.5, 0.5};
    const double theta_null = rad2deg(std::asin(0.25));
    Rng rng(89);
    Scenario scn;
    scn.geom = geom;
    scn.theta_t_deg = 0.0;
    scn.dirs = DirectionSet{{theta_null}};
    scn.n_comm = 1;
    scn.desired = random_complex(rng, 1, 16);
    scn.total_energy = scn.desired.squaredNorm() + 10.0;
    CHECK(beampattern_gain(geom, 0.0, theta_null) < 1e-12);
    const CoherentSolution coh = coherent_case(scn, model);
    CHECK(std::abs(coh.alpha1 - cxd(1.0 / 8.0, 0.0)) < 1e-9);
    CHECK(std::abs(coh.alpha2) > 0.0);
    CHECK(numerical_rank(coh.solution.waveform) == 1);
    // equality constraint still holds and all energy is used
    const VecC a_bar = tx_steering(geom, theta_null);
    CHECK((a_bar.adjoint() * coh.solution.waveform - scn.desired.row(0)).norm() <=
          1e-9 * scn.desired.norm());
    CHECK(coh.solution.waveform.squaredNorm() ==
          doctest::Approx(scn.total_energy).epsilon(1e-10));
  }
  SUBCASE("direction at the target angle falls back to the degenerate branch") {
    Rng rng(97);
    Scenario scn;
    scn.geom = ArrayGeometry{8, 8, 0.5, 0.5};
    scn.theta_t_deg = 15.0;
    scn.dirs = DirectionSet{{15.0}};
    scn.n_comm = 1;
    scn.desired = random_complex(rng, 1, 16);
    scn.total_energy = scn.desired.squaredNorm() + 10.0;
    const CoherentSolution coh = coherent_case(scn, model);
    CHECK(std::abs(coh.alpha2) == 0.0);
    CHECK(coh.solution.sinr_t ==
          doctest::Approx(scn.desired.row(0).squaredNorm()).epsilon(1e-9));
  }
  SUBCASE("rejects multi-direction scenarios") {
    Scenario scn;
    scn.geom = kGeom;
    scn.dirs = DirectionSet{{-25.0, 20.0}};
    scn.n_comm = 1;
    scn.desired = MatC::Zero(2, 4);
    scn.total_energy = 10.0;
    CHECK_THROWS_AS(coherent_case(scn, model), std::logic_error);
  }
}

TEST_CASE("approximate SINR cases") {
  SUBCASE("case 1: all sidelobes") {
    VecD e(2), g(2);
    e << 100.0, 100.0;
    g << 0.0, 0.0;
    const SinrApproximation approx = approximate_sinr_from_gains(50.0, 12, e, g);
    CHECK(approx.valid);
    CHECK(approx.value ==
          doctest::Approx((50.0 - 200.0 / 12.0) * 12.0).epsilon(1e-12));
  }
  SUBCASE("case 2: equal energies attain the bound at the critical gain") {
    const double e_t = 4.0 * 128.0 / 12.0;
    const double e_bar = 128.0;
    const int n0 = 2;
    const double bound = sinr_bound_case2(e_t, 12, n0, e_bar);
    const double g_star = e_bar / (12.0 * e_t - (n0 - 1) * e_bar);
    VecD e(2), g(2);
    e << e_bar, e_bar;
    g << std::sqrt(g_star / 2.0), std::sqrt(g_star / 2.0);
    const SinrApproximation approx = approximate_sinr_from_gains(e_t, 12, e, g);
    CHECK(approx.value == doctest::Approx(bound).epsilon(1e-10));
  }
  SUBCASE("case 3: one mainlobe direction pins the SINR at its energy") {
    VecD e(3), g(3);
    e << 77.0, 50.0, 60.0;
    g << 1.0, 0.0, 0.0;
    const SinrApproximation approx = approximate_sinr_from_gains(40.0, 12, e, g);
    CHECK(approx.value == doctest::Approx(77.0).epsilon(1e-12));
  }
  SUBCASE("g_sos beyond one is flagged invalid") {
    VecD e(2), g(2);
    e << 10.0, 10.0;
    g << 0.9, 0.9;
    CHECK_FALSE(approximate_sinr_from_gains(100.0, 12, e, g).valid);
  }
  SUBCASE("scenario-driven approximation tracks the exact solver within 0.5 dB") {
    Rng rng(101);
    const int l = 32;
    const StructuredCovariance model{1.0, {}, l};
    for (int t = 0; t < 25; ++t) {
      Scenario scn;
      scn.geom = kGeom;
      scn.theta_t_deg = 0.0;
      // well-separated sidelobe directions
      const double th1 = -60.0 + 25.0 * rng.uniform();
      const double th2 = 20.0 + 25.0 * rng.uniform();
      scn.dirs = DirectionSet{{th1, th2}};
      scn.n_comm = 1;
      // orthogonal rows with equal energy
      MatC d = MatC::Zero(2, l);
      for (int i = 0; i < l / 2; ++i) d(0, i) = rng.cnormal();
      for (int i = l / 2; i < l; ++i) d(1, i) = rng.cnormal();
      d.row(0) *= std::sqrt(double(l)) / d.row(0).norm();
      d.row(1) *= std::sqrt(double(l)) / d.row(1).norm();
      scn.desired = d;
      scn.total_energy = 4.0 * l / 12.0 * 12.0 / 3.0;  // comfortably feasible
      const SinrApproximation approx = approximate_sinr(scn);
      REQUIRE(approx.valid);
      const StructuredSolution exact = solve_structured(scn, model);
      CHECK(std::abs(lin2db(exact.sinr_t) - lin2db(approx.value)) <= 0.5);
    }
  }
}

TEST_CASE("case-2 bound") {
  SUBCASE("single direction reduces to the radar-only value") {
    CHECK(sinr_bound_case2(42.0, 12, 1, 128.0) == doctest::Approx(42.0 * 12.0));
  }
  SUBCASE("two-direction sweep setting loses about 1.25 dB") {
    const double l = 128.0;
    const double e_t = 4.0 * l / 12.0;
    const double bound = sinr_bound_case2(e_t, 12, 2, l);
    CHECK(bound == doctest::Approx(3.0 * l).epsilon(1e-12));
    CHECK(lin2db(e_t * 12.0) - lin2db(bound) == doctest::Approx(1.25).epsilon(0.01));
  }
  SUBCASE("exact solver never exceeds the bound on orthogonal equal-energy scenarios") {
    Rng rng(103);
    const int l = 16;
    const StructuredCovariance model{1.0, {}, l};
    for (int t = 0; t < 200; ++t) {
      Scenario scn;
      scn.geom = kGeom;
      scn.theta_t_deg = 0.0;
      // sidelobe region, at least ~4 degrees apart
      double th1 = (rng.uniform() < 0.5 ? -1.0 : 1.0) * (10.0 + 50.0 * rng.uniform());
      double th2 = (rng.uniform() < 0.5 ? -1.0 : 1.0) * (10.0 + 50.0 * rng.uniform());
      if (std::abs(th1 - th2) < 4.0) th2 = th1 + (th2 >= th1 ? 4.0 : -4.0);
      scn.dirs = DirectionSet{{th1, th2}};
      scn.n_comm = 1;
      MatC d = random_complex(rng, 2, l);
      // orthogonalize the second row against the first, equal energies
      const cxd overlap = d.row(0).dot(d.row(1));
      d.row(1) -= (overlap / d.row(0).squaredNorm()) * d.row(0);
      const double e_bar = static_cast<double>(l);
      d.row(0) *= std::sqrt(e_bar) / d.row(0).norm();
      d.row(1) *= std::sqrt(e_bar) / d.row(1).norm();
      scn.desired = d;
      scn.total_energy = 4.0 * l;
      const StructuredSolution sol = solve_structured(scn, model);
      const double bound = sinr_bound_case2(scn.total_energy, 12, 2, e_bar);
      CHECK(sol.sinr_t <= bound * (1.0 + 1e-9));
    }
  }
}
