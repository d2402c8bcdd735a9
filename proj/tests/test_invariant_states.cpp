#include <doctest.h>

#include <cmath>
#include <random>

#include "gaussdyn/invariant_states.hpp"
#include "oracles.hpp"

using namespace gaussdyn;

TEST_CASE("one-mode flow matrix") {
  SUBCASE("entries and rank for generic coefficients") {
    const double w1 = 0.5, w2 = 0.5, w3 = 2.0;
    const FlowMatrix f = build_flow_matrix_1d(w1, w2, w3);
    Matrix expect(3, 3);
    expect << -4 * w2, -4 * w3, 0, 2 * w1, 0, -2 * w3, 0, 4 * w1, 4 * w2;
    CHECK((f.m - expect).cwiseAbs().maxCoeff() == 0.0);
    const auto ns = null_space(f);
    CHECK(ns.rank == 2);
    REQUIRE(ns.basis.cols() == 1);
    // null direction is proportional to (w3/w1, -w2/w1, 1)
    Vector dir(3);
    dir << w3 / w1, -w2 / w1, 1.0;
    dir.normalize();
    const double overlap = std::abs(dir.dot(ns.basis.col(0)));
    CHECK(overlap == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("null flow for zero coefficients") {
    const FlowMatrix f = build_flow_matrix_1d(0, 0, 0);
    CHECK(f.m.isZero(0.0));
    const auto ns = null_space(f);
    CHECK(ns.rank == 0);
    CHECK(ns.basis.cols() == 3);
  }
  SUBCASE("the flow matrix is the linearization of the matrix flow") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal(0.0, 1.0);
    const SymplecticForm d = symplectic_form(1);
    for (int trial = 0; trial < 200; ++trial) {
      const double w1 = normal(rng), w2 = normal(rng), w3 = normal(rng);
      Matrix b(2, 2);
      b << w1, w2, w2, w3;
      Matrix cov(2, 2);
      const double a = normal(rng), c = normal(rng), e = normal(rng);
      cov << a, c, c, e;
      const Vector lhs = build_flow_matrix_1d(w1, w2, w3).m * vectorize_cov(cov);
      const Vector rhs = vectorize_cov(covariance_rhs(cov, b, d));
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("two-mode flow matrix") {
  std::mt19937_64 rng(22);
  std::normal_distribution<double> normal(0.0, 1.0);
  const SymplecticForm d = symplectic_form(2);

  SUBCASE("linearization identity on random coefficient/covariance pairs") {
    for (int trial = 0; trial < 100; ++trial) {
      Matrix b(4, 4);
      for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
          b(i, j) = normal(rng);
          b(j, i) = b(i, j);
        }
      Matrix cov(4, 4);
      for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
          cov(i, j) = normal(rng);
          cov(j, i) = cov(i, j);
        }
      const Vector lhs = build_flow_matrix_2mode(b).m * vectorize_cov(cov);
      const Vector rhs = vectorize_cov(covariance_rhs(cov, b, d));
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("B = 0 gives the zero matrix") {
    CHECK(build_flow_matrix_2mode(Matrix::Zero(4, 4)).m.isZero(0.0));
  }
  SUBCASE("asymmetric input is rejected") {
    Matrix b = Matrix::Zero(4, 4);
    b(0, 1) = 1.0;
    CHECK_THROWS_AS(build_flow_matrix_2mode(b), NonSymmetricB);
  }
  SUBCASE("vectorize/unvectorize round trip") {
    GaussianState s = oracles::random_physical_state(rng, 2);
    CHECK((unvectorize_cov(vectorize_cov(s.cov), 2) - s.cov)
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
}

TEST_CASE("converter and amplifier null spaces") {
  const double w1 = 2.0, w2 = 1.0, om = 7.0, ka = std::sqrt(10.0);
  auto conv = build_frequency_converter(w1, w2, om, ka);
  auto amp = build_parametric_amplifier(w1, w2, om, ka);

  for (double t : {0.0, 0.77}) {
    CAPTURE(t);
    SUBCASE("converter: rank 8, one scalable-physical direction") {
      const FlowMatrix f = build_flow_matrix_2mode(conv.b(t), t);
      const auto ns = null_space(f);
      CHECK(ns.rank == 8);
      CHECK(std::abs(f.m.determinant()) < 1e-10);
      const auto dirs = canonical_null_directions(ns, 2);
      REQUIRE(dirs.size() == 2);
      // the variance-supported direction is C diag(w1 w2, w2/w1, w2^2, 1)
      Vector expect = vectorize_cov(converter_invariant_cov(1.0, w1, w2));
      expect.normalize();
      CHECK(std::abs(expect.dot(dirs[0])) ==
            doctest::Approx(1.0).epsilon(1e-10));
      CHECK(physical_after_scaling(dirs[0], 2));
      CHECK_FALSE(physical_after_scaling(dirs[1], 2));
    }
    SUBCASE("amplifier: rank 8, no scalable-physical direction") {
      const FlowMatrix f = build_flow_matrix_2mode(amp.b(t), t);
      const auto ns = null_space(f);
      CHECK(ns.rank == 8);
      const auto dirs = canonical_null_directions(ns, 2);
      REQUIRE(dirs.size() == 2);
      for (const auto& dir : dirs) CHECK_FALSE(physical_after_scaling(dir, 2));
      // the variance-supported direction carries the sign-indefinite pattern
      // (-w1 w2, -w2/w1, w2^2, 1) up to normalization
      Vector pattern = Vector::Zero(10);
      pattern(0) = -w1 * w2;
      pattern(4) = -w2 / w1;
      pattern(7) = w2 * w2;
      pattern(9) = 1.0;
      pattern.normalize();
      CHECK(std::abs(pattern.dot(dirs[0])) ==
            doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("one-mode invariant state") {
  SUBCASE("oscillator example") {
    // B of the omega = 2, nu = 1 oscillator: (w1, w2, w3) = (1/2, 1/2, 2)
    const auto inv = invariant_state_1d(1.0, 0.5, 0.5, 2.0);
    Matrix expect(2, 2);
    expect << 4.0, -1.0, -1.0, 1.0;
    CHECK((inv.state.cov - expect).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(inv.params.a1.real() == doctest::Approx(13.0 / 8.0).epsilon(1e-14));
    CHECK(inv.params.a1.imag() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(inv.params.a12 == doctest::Approx(11.0 / 4.0).epsilon(1e-14));
    // parameter form agrees with the state-to-parameter map
    const auto p = params_from_state_1d(inv.state);
    CHECK(std::abs(p.a1 - inv.params.a1) < 1e-13);
    CHECK(p.a12 == doctest::Approx(inv.params.a12).epsilon(1e-13));
  }
  SUBCASE("no pq correlation when w2 = 0") {
    const auto inv = invariant_state_1d(2.0, 0.5, 0.0, 1.0);
    CHECK(inv.state.cov(0, 1) == 0.0);
    CHECK(inv.state.cov(0, 0) == doctest::Approx(4.0));
    CHECK(inv.state.cov(1, 1) == doctest::Approx(2.0));
  }
  SUBCASE("guards") {
    CHECK_THROWS_AS(invariant_state_1d(1.0, 0.0, 0.5, 2.0), ZeroOmega1);
    CHECK_THROWS_AS(invariant_state_1d(0.2, 0.5, 0.5, 2.0), UnphysicalC);
  }
  SUBCASE("stays put for ten time units") {
    const auto inv = invariant_state_1d(1.0, 0.5, 0.5, 2.0);
    auto h = build_coupled_oscillator(2.0, 1.0);
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_max = 10.0;
    cfg.sample_stride = 100;
    const Trajectory traj = evolve(h, inv.state, cfg);
    for (const auto& s : traj.states)
      CHECK((s.cov - inv.state.cov).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("parameter form reproduces the covariance over random scales") {
    std::mt19937_64 rng(333);
    std::uniform_real_distribution<double> uni(0.3, 3.0);
    const SymplecticForm d = symplectic_form(1);
    int built = 0;
    while (built < 200) {
      const double w1 = uni(rng), w2 = uni(rng) - 1.5, w3 = uni(rng);
      const double c = uni(rng);
      const double det = c * c * (w3 / w1 - (w2 / w1) * (w2 / w1));
      if (!(det > 0.26)) continue;
      ++built;
      const auto inv = invariant_state_1d(c, w1, w2, w3);
      const GaussianState mapped = state_from_params_1d(inv.params);
      CHECK((mapped.cov - inv.state.cov).cwiseAbs().maxCoeff() < 1e-12);
      Matrix b(2, 2);
      b << w1, w2, w2, w3;
      // stationary to rounding when substituted into the flow
      CHECK(covariance_rhs(inv.state.cov, b, d).cwiseAbs().maxCoeff() <
            1e-13 * std::max(1.0, inv.state.cov.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("converter invariant state") {
  const double w1 = 2.0, w2 = 1.0;
  SUBCASE("covariance entries") {
    const auto inv = invariant_state_frequency_converter(1.0, w1, w2);
    CHECK(inv.state.cov(0, 0) == doctest::Approx(w1 * w2));
    CHECK(inv.state.cov(1, 1) == doctest::Approx(w2 / w1));
    CHECK(inv.state.cov(2, 2) == doctest::Approx(w2 * w2));
    CHECK(inv.state.cov(3, 3) == doctest::Approx(1.0));
    CHECK((inv.state.cov - Matrix(inv.state.cov.diagonal().asDiagonal()))
              .cwiseAbs()
              .maxCoeff() == 0.0);
    // parameter form round-trips through the covariance map
    const GaussianState back = covariances_from_bipartite_params(inv.params);
    CHECK((back.cov - inv.state.cov).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("equal frequencies degenerate to identical mode blocks") {
    const auto inv = invariant_state_frequency_converter(1.0, 1.5, 1.5);
    CHECK((inv.state.cov.topLeftCorner<2, 2>() -
           inv.state.cov.bottomRightCorner<2, 2>())
              .cwiseAbs()
              .maxCoeff() < 1e-14);
  }
  SUBCASE("unphysical scale is rejected") {
    CHECK_THROWS_AS(invariant_state_frequency_converter(0.1, w1, w2),
                    UnphysicalC);
  }
  SUBCASE("the flow vanishes to rounding at any frozen time") {
    const auto inv = invariant_state_frequency_converter(1.0, w1, w2);
    const SymplecticForm d = symplectic_form(2);
    for (double ka : {0.5, std::sqrt(10.0)}) {
      auto h = build_frequency_converter(w1, w2, 7.0, ka);
      for (double t : {0.0, 0.37, 2.9})
        CHECK(covariance_rhs(inv.state.cov, h.b(t), d).cwiseAbs().maxCoeff() <
              1e-14);
    }
  }
  SUBCASE("covariances frozen under any pump and coupling") {
    const auto inv = invariant_state_frequency_converter(1.0, w1, w2);
    for (double ka : {0.5, 1.0, std::sqrt(10.0)}) {
      auto h = build_frequency_converter(w1, w2, 1.0, ka);
      IntegratorConfig cfg;
      cfg.dt = 1e-3;
      cfg.t_max = 10.0;
      cfg.sample_stride = 100;
      const Trajectory traj = evolve(h, inv.state, cfg);
      for (const auto& s : traj.states)
        CHECK((s.cov - inv.state.cov).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("quasi-invariance score") {
  auto h = build_frequency_converter(2.0, 1.0, 1.0, 1.0);
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_max = 2.0;
  cfg.sample_stride = 20;

  SUBCASE("exact invariant states score zero") {
    // synthetic trajectory holding the exact stationary state: the rate
    // numerator vanishes up to rounding, so the score sits at the eps floor
    const auto inv = invariant_state_frequency_converter(1.0, 2.0, 1.0);
    Trajectory traj;
    for (int k = 0; k <= 40; ++k) {
      const double t = 0.05 * k;
      traj.times.push_back(t);
      traj.states.push_back(inv.state);
      traj.energies.push_back(mean_energy(h, inv.state, t));
      traj.det_cov.push_back(inv.state.cov.determinant());
    }
    const auto score = quasi_invariance_score(traj, h);
    for (double s : score) CHECK(s < 1e-3);
  }
  SUBCASE("a generic state scores well above zero") {
    std::mt19937_64 rng(4);
    const Trajectory traj =
        evolve(h, oracles::random_physical_state(rng, 2, 0.5, true), cfg);
    const auto score = quasi_invariance_score(traj, h);
    double mx = 0.0;
    for (double s : score) mx = std::max(mx, s);
    CHECK(mx > 1e-2);
  }
  SUBCASE("an energy series is required") {
    Trajectory empty;
    CHECK_THROWS_AS(quasi_invariance_score(empty, h), DimensionMismatch);
  }
}
