#include <catch_amalgamated.hpp>

#include <dmp/bvp.hpp>

#include "test_support.hpp"

using namespace dmp;
using namespace testsupport;

TEST_CASE("fixed-time quintic matches the canonical rest-to-rest polynomial") {
  const auto traj = solve_fixed_time_bvp(state1(0, 0, 0), state1(1, 0, 0), 1.0);
  REQUIRE(traj.segments().size() == 1);
  const auto& c = traj.segments()[0].coeffs;
  CHECK_THAT(c(0, 0), Catch::Matchers::WithinAbs(0.0, 1e-12));
  CHECK_THAT(c(0, 1), Catch::Matchers::WithinAbs(0.0, 1e-12));
  CHECK_THAT(c(0, 2), Catch::Matchers::WithinAbs(0.0, 1e-12));
  CHECK_THAT(c(0, 3), Catch::Matchers::WithinAbs(10.0, 1e-9));
  CHECK_THAT(c(0, 4), Catch::Matchers::WithinAbs(-15.0, 1e-9));
  CHECK_THAT(c(0, 5), Catch::Matchers::WithinAbs(6.0, 1e-9));

  const double closed = jerk_squared_integral(traj);
  const double quad = quadrature_jerk_sq(traj);
  CHECK_THAT(closed, Catch::Matchers::WithinRel(720.0, 1e-9));
  CHECK_THAT(quad, Catch::Matchers::WithinRel(closed, 1e-8));
}

TEST_CASE("rest-to-rest jerk integral follows the d^2 / T^5 scaling") {
  for (double T : {0.5, 1.0, 2.0}) {
    const double base = jerk_squared_integral(solve_fixed_time_bvp(state1(0, 0, 0), state1(1, 0, 0), T));
    for (double d : {1.0, 2.0, 4.0}) {
      const double j = jerk_squared_integral(solve_fixed_time_bvp(state1(0, 0, 0), state1(d, 0, 0), T));
      CHECK_THAT(j, Catch::Matchers::WithinRel(base * d * d, 1e-9));
      CHECK_THAT(j, Catch::Matchers::WithinRel(720.0 * d * d / std::pow(T, 5), 1e-9));
    }
  }
}

TEST_CASE("identity and cruise boundary conditions carry zero jerk") {
  SECTION("equal rest states") {
    const auto traj = solve_fixed_time_bvp(state1(0.3, 0, 0), state1(0.3, 0, 0), 2.0);
    CHECK(jerk_squared_integral(traj) == Catch::Approx(0.0).margin(1e-12));
    CHECK_THAT(traj.eval(1.0, 0)[0], Catch::Matchers::WithinAbs(0.3, 1e-12));
  }
  SECTION("constant-velocity cruise") {
    const auto traj = solve_fixed_time_bvp(state1(0, 1, 0), state1(1, 1, 0), 1.0);
    CHECK(jerk_squared_integral(traj) == Catch::Approx(0.0).margin(1e-9));
    CHECK_THAT(traj.eval(0.25, 0)[0], Catch::Matchers::WithinAbs(0.25, 1e-9));
  }
}

TEST_CASE("fixed-time solutions meet all boundary conditions on random pairs") {
  Rng rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const int dim = 1 + static_cast<int>(rng.next_u64() % 3);
    const auto a = random_state(rng, dim, 5.0, 3.0, 2.0);
    const auto b = random_state(rng, dim, 5.0, 3.0, 2.0);
    const double T = rng.uniform(0.3, 5.0);
    const auto traj = solve_fixed_time_bvp(a, b, T);
    CHECK((traj.eval(0.0, 0) - a.position).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((traj.eval(0.0, 1) - a.velocity).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((traj.eval(0.0, 2) - a.acceleration).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((traj.eval(T, 0) - b.position).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((traj.eval(T, 1) - b.velocity).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((traj.eval(T, 2) - b.acceleration).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("fixed-time solver rejects invalid input") {
  CHECK_THROWS_AS(solve_fixed_time_bvp(state1(0, 0, 0), state1(1, 0, 0), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_fixed_time_bvp(state1(0, 0, 0), state1(1, 0, 0), -1.0), std::invalid_argument);
  auto bad = state1(0, 0, 0);
  bad.position[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(solve_fixed_time_bvp(bad, state1(1, 0, 0), 1.0), std::invalid_argument);
  FullState two = FullState::zero(2);
  CHECK_THROWS_AS(solve_fixed_time_bvp(state1(0, 0, 0), two, 1.0), std::invalid_argument);
}

TEST_CASE("trajectory evaluation semantics") {
  const auto a = state1(0, 0, 0);
  const auto b = state1(1, 0, 0);
  auto traj = solve_fixed_time_bvp(a, b, 1.0);

  SECTION("boundary and midpoint values") {
    CHECK_THAT(traj.eval(0.0, 0)[0], Catch::Matchers::WithinAbs(0.0, 1e-12));
    CHECK_THAT(traj.eval(0.5, 0)[0], Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK_THAT(traj.eval(1.0, 0)[0], Catch::Matchers::WithinAbs(1.0, 1e-12));
  }
  SECTION("junction continuity from both sides") {
    Trajectory second = solve_fixed_time_bvp(b, state1(3, 0, 0), 2.0);
    Trajectory joined = traj;
    joined.append(second);
    const double tj = 1.0;
    for (int order = 0; order <= 2; ++order) {
      const double before = joined.eval(tj - 1e-12, order)[0];
      const double after = joined.eval(tj + 1e-12, order)[0];
      CHECK_THAT(before, Catch::Matchers::WithinAbs(after, 1e-9));
    }
  }
  SECTION("out-of-range time is a domain error") {
    CHECK_THROWS_AS(traj.eval(-0.1, 0), std::domain_error);
    CHECK_THROWS_AS(traj.eval(1.1, 0), std::domain_error);
  }
  SECTION("derivative orders") {
    CHECK_THAT(traj.eval(0.0, 3)[0], Catch::Matchers::WithinAbs(60.0, 1e-9));  // 6 c3
  }
}

TEST_CASE("optimize_primitive finds the unconstrained minimum of J") {
  DynamicsLimits lim{10.0, 10.0, 3600.0};
  const auto prim = optimize_primitive(state1(0, 0, 0), state1(1, 0, 0), lim);
  const double T = prim.trajectory.total_duration();

  // J(T) = 3600 T + 720 / T^5 has its minimum at exactly T = 1, J = 4320.
  CHECK_THAT(T, Catch::Matchers::WithinAbs(1.0, 1e-4));
  CHECK_THAT(prim.cost, Catch::Matchers::WithinRel(4320.0, 1e-6));

  // independent check via the bracketed dense-scan oracle
  const double t_oracle = oracle_best_duration(prim.start, prim.end, lim.rho, 0.2, 4.0);
  CHECK_THAT(T, Catch::Matchers::WithinAbs(t_oracle, 2e-3));

  // stationarity via central differences on the oracle cost
  const double h = 1e-4;
  const double dj = (oracle_duration_cost(prim.start, prim.end, T + h, lim.rho) -
                     oracle_duration_cost(prim.start, prim.end, T - h, lim.rho)) /
                    (2.0 * h);
  CHECK(std::abs(dj) < 1.0);

  // stored cost matches a recompute from the trajectory
  CHECK_THAT(prim.cost, Catch::Matchers::WithinRel(trajectory_cost(prim.trajectory, lim.rho), 1e-9));
}

TEST_CASE("optimize_primitive respects a binding velocity limit") {
  DynamicsLimits lim{1.0, 50.0, 10.0};
  const auto prim = optimize_primitive(state1(0, 0, 0), state1(10, 0, 0), lim);
  const double T = prim.trajectory.total_duration();

  // peak speed of the rest-to-rest quintic is (15/8) d / T
  CHECK(T >= 18.75 - 1e-3);
  CHECK(dense_max_abs(prim.trajectory, 1) <= lim.v_max + 1e-6);
  CHECK(dense_max_abs(prim.trajectory, 2) <= lim.a_max + 1e-6);

  // constrained local optimality: feasible perturbations cannot do better
  for (double factor : {0.99, 1.01}) {
    const auto perturbed = solve_fixed_time_bvp(prim.start, prim.end, T * factor);
    if (within_limits(perturbed, lim, 1000, 1e-9))
      CHECK(prim.cost <= trajectory_cost(perturbed, lim.rho) + 1e-9 * prim.cost);
  }
}

TEST_CASE("optimize_primitive degenerate and error cases") {
  DynamicsLimits lim{2.0, 2.0, 10.0};
  SECTION("identical states yield a zero-duration, zero-cost primitive") {
    const auto s = state1(0.7, 0.5, -0.3);
    const auto prim = optimize_primitive(s, s, lim);
    CHECK(prim.trajectory.total_duration() == 0.0);
    CHECK(prim.cost == 0.0);
    CHECK((prim.trajectory.eval(0.0, 0) - s.position).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((prim.trajectory.eval(0.0, 1) - s.velocity).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((prim.trajectory.eval(0.0, 2) - s.acceleration).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("boundary state outside the box is rejected") {
    CHECK_THROWS_AS(optimize_primitive(state1(0, 3.0, 0), state1(1, 0, 0), lim),
                    InfeasibleBoundaryError);
    CHECK_THROWS_AS(optimize_primitive(state1(0, 0, 0), state1(1, 0, 5.0), lim),
                    InfeasibleBoundaryError);
  }
}

TEST_CASE("optimized primitives are locally optimal and feasible on random pairs") {
  Rng rng(99);
  DynamicsLimits lim{3.0, 2.5, 10.0};
  for (int trial = 0; trial < 40; ++trial) {
    const int dim = 1 + static_cast<int>(rng.next_u64() % 3);
    const auto a = random_state(rng, dim, 4.0, 2.8, 2.3);
    const auto b = random_state(rng, dim, 4.0, 2.8, 2.3);
    const auto prim = optimize_primitive(a, b, lim);
    const double T = prim.trajectory.total_duration();

    CHECK(prim.cost >= 0.0);
    CHECK(within_limits(prim.trajectory, lim, 1000, 1e-6));
    CHECK_THAT(trajectory_cost(prim.trajectory, lim.rho),
               Catch::Matchers::WithinRel(prim.cost, 1e-9));
    // endpoints to 1e-6 in all three derivative levels
    CHECK((prim.trajectory.eval(T, 0) - b.position).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((prim.trajectory.eval(T, 1) - b.velocity).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((prim.trajectory.eval(T, 2) - b.acceleration).cwiseAbs().maxCoeff() < 1e-6);

    for (double factor : {0.99, 1.01}) {
      const auto perturbed = solve_fixed_time_bvp(a, b, T * factor);
      if (within_limits(perturbed, lim, 1000, 1e-9))
        CHECK(prim.cost <= trajectory_cost(perturbed, lim.rho) + 1e-6 * std::max(1.0, prim.cost));
    }
  }
}

TEST_CASE("cost is asymmetric-safe: only nonnegativity and self-identity are assumed") {
  Rng rng(5);
  DynamicsLimits lim{3.0, 2.5, 10.0};
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_state(rng, 2, 4.0, 2.0, 1.5);
    const auto b = random_state(rng, 2, 4.0, 2.0, 1.5);
    CHECK(optimize_primitive(a, b, lim).cost >= 0.0);
    CHECK(optimize_primitive(a, a, lim).cost == 0.0);
  }
}

TEST_CASE("stopping_primitive brings any in-limit state to rest") {
  DynamicsLimits lim{3.0, 2.0, 10.0};
  SECTION("already at rest") {
    const auto traj = stopping_primitive(FullState::rest(Vec::Constant(2, 1.0)), lim);
    CHECK(traj.total_duration() == 0.0);
  }
  SECTION("1D stop lands at the constant-deceleration point") {
    const double v = 2.0;
    const auto traj = stopping_primitive(state1(0, v, 0), lim);
    const double T = traj.total_duration();
    CHECK_THAT(traj.eval(T, 0)[0], Catch::Matchers::WithinAbs(v * v / (2.0 * lim.a_max), 1e-6));
    CHECK(traj.eval(T, 1).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(traj.eval(T, 2).cwiseAbs().maxCoeff() < 1e-6);
  }
  SECTION("2D diagonal stop is feasible and ends at rest") {
    FullState s;
    s.position = vec2(0, 0);
    s.velocity = vec2(1.5, 1.5);
    s.acceleration = vec2(0, 0);
    const auto traj = stopping_primitive(s, lim);
    const double T = traj.total_duration();
    CHECK(traj.eval(T, 1).norm() < 1e-6);
    CHECK(dense_max_abs(traj, 2) <= lim.a_max + 1e-6);
  }
}

TEST_CASE("trajectory JSON round-trip preserves segments") {
  Rng rng(3);
  const auto a = random_state(rng, 2, 4.0, 2.0, 1.5);
  const auto b = random_state(rng, 2, 4.0, 2.0, 1.5);
  auto traj = solve_fixed_time_bvp(a, b, 1.7);
  traj.append(solve_fixed_time_bvp(b, a, 0.9));

  const auto j = traj.to_json();
  const auto back = Trajectory::from_json(j);
  REQUIRE(back.segments().size() == traj.segments().size());
  CHECK(back.total_duration() == traj.total_duration());
  for (std::size_t i = 0; i < traj.segments().size(); ++i)
    CHECK((back.segments()[i].coeffs - traj.segments()[i].coeffs).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(Trajectory::from_json(nlohmann::json::object()), FormatError);
}
