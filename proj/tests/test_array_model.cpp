// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "mfrf/array_model.hpp"
#include "test_util.hpp"

using namespace mfrf;
using namespace mfrf::testutil;

TEST_CASE("tx steering at broadside is all ones") {
  const ArrayGeometry geom{2, 2, 0.5, 0.5};
  const VecC a = tx_steering(geom, 0.0);
  CHECK(a.size() == 2);
  CHECK(std::abs(a(0) - cxd(1, 0)) < 1e-15);
  CHECK(std::abs(a(1) - cxd(1, 0)) < 1e-15);
}

TEST_CASE("tx steering near endfire approaches [1, -1]") {
  const ArrayGeometry geom{2, 2, 0.5, 0.5};
  const VecC a = tx_steering(geom, 90.0 - 1e-7);
  CHECK(std::abs(a(0) - cxd(1, 0)) < 1e-12);
  CHECK(std::abs(a(1) - cxd(-1, 0)) < 1e-6);
  CHECK_THROWS_AS(tx_steering(geom, 90.0), std::invalid_argument);
  CHECK_THROWS_AS(tx_steering(geom, -90.0), std::invalid_argument);
}

TEST_CASE("tx steering phases match a per-element scalar oracle") {
  const ArrayGeometry geom{12, 12, 0.5, 0.5};
  const double theta = 20.0;
  const VecC a = tx_steering(geom, theta);
  for (int m = 0; m < 12; ++m) {
    const double phase = 2.0 * pi * 0.5 * m * std::sin(deg2rad(theta));
    CHECK(std::abs(a(m) - std::polar(1.0, phase)) < 1e-14);
  }
  CHECK(a.squaredNorm() == doctest::Approx(12.0).epsilon(1e-14));
}

TEST_CASE("rx steering examples") {
  ArrayGeometry geom{2, 2, 0.5, 0.5};
  VecC b = rx_steering(geom, 0.0);
  CHECK((b - VecC::Ones(2)).norm() < 1e-15);

  geom.n_rx = 12;
  b = rx_steering(geom, 0.0);
  CHECK((b - VecC::Ones(12)).norm() < 1e-15);
  CHECK(b.squaredNorm() == doctest::Approx(12.0));

  geom.n_rx = 3;
  b = rx_steering(geom, 30.0);
  // 2 pi * 0.5 * sin 30 = pi/2 per element
  CHECK(std::arg(b(0)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::arg(b(1)) == doctest::Approx(pi / 2).epsilon(1e-12));
  CHECK(std::abs(b(2) - cxd(-1.0, 0.0)) < 1e-12);
}

TEST_CASE("steering norm is exactly the antenna count for random angles") {
  const ArrayGeometry geom{9, 4, 0.5, 0.5};
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const double theta = -89.9 + 179.8 * rng.uniform();
    CHECK(tx_steering(geom, theta).squaredNorm() ==
          doctest::Approx(9.0).epsilon(1e-13));
  }
}

TEST_CASE("steering matrix columns and order") {
  const ArrayGeometry geom{12, 12, 0.5, 0.5};

  const MatC ones = steering_matrix(ArrayGeometry{4, 4, 0.5, 0.5}, {{0.0}});
  CHECK((ones - MatC::Ones(4, 1)).norm() < 1e-14);

  const DirectionSet dirs{{-25.0, 20.0}};
  const MatC a = steering_matrix(geom, dirs);
  CHECK(a.rows() == 12);
  CHECK(a.cols() == 2);
  CHECK((a.col(0) - tx_steering(geom, -25.0)).norm() == 0.0);
  CHECK((a.col(1) - tx_steering(geom, 20.0)).norm() == 0.0);

  CHECK_THROWS_AS(steering_matrix(geom, DirectionSet{{10.0, 10.0}}),
                  std::invalid_argument);
}

TEST_CASE("large well-separated array is nearly orthogonal") {
  const ArrayGeometry geom{64, 4, 0.5, 0.5};
  const DirectionSet dirs{{-40.0, -10.0, 25.0, 60.0}};
  const MatC a = steering_matrix(geom, dirs);
  const MatC gram = a.adjoint() * a;
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(gram(i, i) - cxd(64.0, 0.0)) < 1e-10);
    for (int j = 0; j < 4; ++j) {
      if (i != j) CHECK(std::abs(gram(i, j)) <= 0.15 * 64.0);
    }
  }
}

TEST_CASE("normalized beampattern") {
  const ArrayGeometry geom{12, 12, 0.5, 0.5};
  SUBCASE("self gain is one") {
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
      const double theta = -80.0 + 160.0 * rng.uniform();
      CHECK(std::abs(normalized_beampattern(geom, theta, theta) - cxd(1, 0)) < 1e-13);
    }
  }
  SUBCASE("two-element array null toward endfire") {
    const ArrayGeometry g2{2, 2, 0.5, 0.5};
    CHECK(std::abs(normalized_beampattern(g2, 0.0, 90.0 - 1e-7)) < 1e-6);
  }
  SUBCASE("matches the Dirichlet kernel oracle") {
    const double u = 2.0 * pi * 0.5 * (std::sin(deg2rad(-25.0)) - std::sin(0.0));
    const double oracle = dirichlet_gain(12, u);
    CHECK(beampattern_gain(geom, 0.0, -25.0) == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("lifted target") {
  const ArrayGeometry geom{2, 2, 0.5, 0.5};
  SUBCASE("L = 1 is the rank-one outer product") {
    const LiftedTarget h(geom, 17.0, 1);
    const MatC dense = h.materialize();
    const MatC oracle = rx_steering(geom, 17.0) * tx_steering(geom, 17.0).adjoint();
    CHECK((dense - oracle).norm() < 1e-14);
  }
  SUBCASE("L = 2 block diagonal with identical blocks") {
    const LiftedTarget h(geom, -33.0, 2);
    const MatC dense = h.materialize();
    const MatC block = rx_steering(geom, -33.0) * tx_steering(geom, -33.0).adjoint();
    CHECK((dense.block(0, 0, 2, 2) - block).norm() < 1e-14);
    CHECK((dense.block(2, 2, 2, 2) - block).norm() < 1e-14);
    CHECK(dense.block(0, 2, 2, 2).norm() == 0.0);
    CHECK(dense.block(2, 0, 2, 2).norm() == 0.0);
  }
  SUBCASE("implicit apply equals the materialized product") {
    Rng rng(5);
    const ArrayGeometry g{3, 4, 0.5, 0.5};
    for (int trial = 0; trial < 10; ++trial) {
      const int l = 1 + static_cast<int>(rng.uniform() * 8);
      const LiftedTarget h(g, -50.0 + 100.0 * rng.uniform(), l);
      const MatC s = random_complex(rng, 3, l);
      const VecC via_op = h.apply(flatten(s));
      const VecC via_dense = h.materialize() * flatten(s);
      CHECK((via_op - via_dense).norm() < 1e-12 * std::max(1.0, via_dense.norm()));
      // vec(A B C) = (C^T kron A) vec(B): H s = vec(b a† S)
      const MatC oracle = h.rx_vector() * (h.tx_vector().adjoint() * s);
      CHECK((via_op - flatten(oracle)).norm() < 1e-13 * std::max(1.0, oracle.norm()));
    }
  }
  SUBCASE("adjoint consistency") {
    Rng rng(6);
    const ArrayGeometry g{3, 2, 0.5, 0.5};
    const LiftedTarget h(g, 12.0, 4);
    const VecC s = random_cvector(rng, 12);
    const VecC y = random_cvector(rng, 8);
    const cxd lhs = y.dot(h.apply(s));
    const cxd rhs = h.apply_adjoint(y).dot(s);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
  SUBCASE("dense form refuses long codes") {
    CHECK_THROWS_AS(LiftedTarget(geom, 0.0, 128).materialize(), std::logic_error);
  }
}

TEST_CASE("lifted direction") {
  const ArrayGeometry geom{3, 3, 0.5, 0.5};
  SUBCASE("L = 1 reduces to the steering vector") {
    const LiftedDirection g(geom, 41.0, 1);
    CHECK((g.materialize() - tx_steering(geom, 41.0)).norm() < 1e-14);
  }
  SUBCASE("adjoint applied to vec(S) is the emitted signal") {
    Rng rng(7);
    const MatC s = random_complex(rng, 3, 4);
    const LiftedDirection g(geom, -18.0, 4);
    const VecC via_op = g.apply_adjoint(flatten(s));
    const VecC via_dense = g.materialize().adjoint() * flatten(s);
    CHECK((via_op - via_dense).norm() < 1e-13);
    const Eigen::RowVectorXcd emitted = tx_steering(geom, -18.0).adjoint() * s;
    CHECK((via_op.transpose() - emitted).norm() == 0.0);
  }
  SUBCASE("broadside emitted signal is the per-slot column sum") {
    Rng rng(8);
    const MatC s = random_complex(rng, 3, 5);
    const LiftedDirection g(geom, 0.0, 5);
    const VecC emitted = g.emitted(s);
    for (int l = 0; l < 5; ++l) {
      CHECK(std::abs(emitted(l) - s.col(l).sum()) < 1e-13);
    }
  }
  SUBCASE("dense form refuses long codes") {
    CHECK_THROWS_AS(LiftedDirection(geom, 0.0, 64 + 1).materialize(), std::logic_error);
  }
}

TEST_CASE("geometry and direction validation") {
  const ArrayGeometry no_antennas{0, 1, 0.5, 0.5};
  const ArrayGeometry zero_spacing{1, 1, 0.0, 0.5};
  CHECK_THROWS_AS(no_antennas.validate(), std::invalid_argument);
  CHECK_THROWS_AS(zero_spacing.validate(), std::invalid_argument);
  const DirectionSet empty{{}};
  const DirectionSet out_of_range{{95.0}};
  CHECK_THROWS_AS(empty.validate(), std::invalid_argument);
  CHECK_THROWS_AS(out_of_range.validate(), std::invalid_argument);
}
