#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "chimap/trajectory.hpp"

using namespace chimap;

namespace {

// Independent position oracle: composite-Simpson integration of the
// velocity r -> a*r/sqrt(1+(a*r)^2) of a constantly accelerating worldline.
double simpson_accel_position(double accel, double t, int n) {
  const auto v = [accel](double u) {
    const double r = accel * u;
    return r / std::sqrt(1.0 + r * r);
  };
  double sum = v(0.0) + v(t);
  for (int i = 1; i < n; ++i)
    sum += v(t * i / n) * ((i % 2 == 1) ? 4.0 : 2.0);
  return sum * t / (3.0 * n);
}

// Independent crossing oracle: plain bisection on mu(t) - chi - s*t.
double bisect_crossing(const Trajectory& traj, double chi, double s,
                       double t_hi) {
  const auto g = [&](double t) {
    return traj.position_at(t) - chi - s * t;
  };
  double lo = 0.0, hi = t_hi;
  REQUIRE(g(lo) * g(hi) <= 0.0);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (g(lo) * g(mid) <= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

Trajectory wavy_sampled() {
  std::vector<double> t(101), x(101);
  double pos = 0.0;
  const auto v = [](double u) { return 0.5 + 0.4 * std::sin(0.7 * u); };
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = 0.1 * static_cast<double>(i);
    if (i > 0) pos += 0.05 * (v(t[i - 1]) + v(t[i]));
    x[i] = pos;
  }
  return Trajectory::sampled(t, x);
}

}  // namespace

TEST_CASE("beta construction enforces time-like values") {
  CHECK(Beta(0.0).value() == 0.0);
  CHECK(Beta(-0.99).value() == -0.99);
  CHECK_THROWS_AS(Beta(1.0), domain_error);
  CHECK_THROWS_AS(Beta(-1.0), domain_error);
  CHECK_THROWS_AS(Beta(1.5), domain_error);
  CHECK_THROWS_AS(Beta(std::nan("")), domain_error);
}

TEST_CASE("constant velocity position and velocity") {
  const Trajectory traj = Trajectory::constant(Beta(0.5));
  CHECK(traj.position_at(0.0) == 0.0);
  CHECK(traj.position_at(4.0) == Catch::Approx(2.0).margin(1e-15));
  CHECK(traj.velocity_at(7.3).value() == 0.5);
  CHECK_THROWS_AS(traj.position_at(-1.0), domain_error);
}

TEST_CASE("uniform acceleration position matches the velocity integral") {
  const Trajectory traj = Trajectory::uniform_acceleration(1.0);
  CHECK(traj.position_at(0.0) == 0.0);
  // frozen from the Simpson oracle (= sqrt(2) - 1)
  const double expected = 0.41421356237309515;
  CHECK(traj.position_at(1.0) == Catch::Approx(expected).margin(1e-12));
  CHECK(simpson_accel_position(1.0, 1.0, 2000) ==
        Catch::Approx(traj.position_at(1.0)).margin(1e-10));
  // another acceleration, same cross-check
  const Trajectory traj2 = Trajectory::uniform_acceleration(0.3);
  CHECK(simpson_accel_position(0.3, 5.0, 4000) ==
        Catch::Approx(traj2.position_at(5.0)).margin(1e-10));
}

TEST_CASE("uniform acceleration velocity") {
  const Trajectory traj = Trajectory::uniform_acceleration(1.0);
  CHECK(traj.velocity_at(0.0).value() == 0.0);
  // frozen: t/sqrt(1+t^2) at t = 1
  CHECK(traj.velocity_at(1.0).value() ==
        Catch::Approx(0.7071067811865476).margin(1e-12));
}

TEST_CASE("velocity agrees with central differences of position") {
  const double h = 1e-5;
  const std::vector<Trajectory> smooth = {
      Trajectory::constant(Beta(0.6)), Trajectory::uniform_acceleration(1.0),
      Trajectory::uniform_acceleration(0.25)};
  for (const auto& traj : smooth) {
    for (double t : {0.5, 1.0, 3.0, 7.5}) {
      const double fd =
          (traj.position_at(t + h) - traj.position_at(t - h)) / (2.0 * h);
      CHECK(std::abs(fd - traj.velocity_at(t).value()) /
                std::max(1e-3, std::abs(fd)) <
            1e-6);
    }
  }
}

TEST_CASE("piecewise velocity uses the right limit at breakpoints") {
  const Trajectory traj =
      Trajectory::piecewise({1.0, 2.0}, {Beta(0.2), Beta(0.8), Beta(0.5)});
  CHECK(traj.velocity_at(0.0).value() == 0.2);
  CHECK(traj.velocity_at(0.999).value() == 0.2);
  CHECK(traj.velocity_at(1.0).value() == 0.8);  // new speed applies at the switch
  CHECK(traj.velocity_at(2.0).value() == 0.5);
  // positions continuous across the switch
  CHECK(traj.position_at(1.0) == Catch::Approx(0.2).margin(1e-15));
  CHECK(traj.position_at(2.0) == Catch::Approx(1.0).margin(1e-15));
  CHECK(traj.position_at(3.0) == Catch::Approx(1.5).margin(1e-15));
}

TEST_CASE("piecewise construction validation") {
  CHECK_THROWS_AS(Trajectory::piecewise({1.0}, {Beta(0.5)}), domain_error);
  CHECK_THROWS_AS(Trajectory::piecewise({2.0, 1.0},
                                        {Beta(0.1), Beta(0.2), Beta(0.3)}),
                  domain_error);
  CHECK_THROWS_AS(Trajectory::piecewise({0.0}, {Beta(0.1), Beta(0.2)}),
                  domain_error);
}

TEST_CASE("sampled trajectory validation") {
  CHECK_THROWS_AS(Trajectory::sampled({0.0}, {0.0}), domain_error);
  CHECK_THROWS_AS(Trajectory::sampled({0.0, 1.0}, {0.1, 0.5}), domain_error);
  CHECK_THROWS_AS(Trajectory::sampled({0.0, 1.0, 0.5}, {0.0, 0.3, 0.4}),
                  domain_error);
  // light-like or faster segments rejected at load
  CHECK_THROWS_AS(Trajectory::sampled({0.0, 1.0}, {0.0, 1.0}), domain_error);
  CHECK_THROWS_AS(Trajectory::sampled({0.0, 1.0}, {0.0, -1.2}), domain_error);
  // valid
  const Trajectory traj = Trajectory::sampled({0.0, 1.0, 3.0}, {0.0, 0.5, 0.9});
  CHECK(traj.position_at(2.0) == Catch::Approx(0.7).margin(1e-15));
  CHECK(traj.velocity_at(1.0).value() == Catch::Approx(0.2).margin(1e-15));
  CHECK_THROWS_AS(traj.position_at(3.5), domain_error);
}

TEST_CASE("worldlines may leave the origin once but never return") {
  // heads out then back through x = 0
  CHECK_THROWS_AS(
      Trajectory::piecewise({1.0}, {Beta(0.5), Beta(-0.5)}), domain_error);
  // final segment pointed back at the origin eventually recrosses
  CHECK_THROWS_AS(
      Trajectory::piecewise({1.0}, {Beta(0.5), Beta(-0.1)}), domain_error);
  // resting prefix is fine
  CHECK_NOTHROW(Trajectory::piecewise({1.0}, {Beta(0.0), Beta(0.5)}));
  // receding to the left is fine too (never returns)
  CHECK_NOTHROW(Trajectory::constant(Beta(-0.6)));
  CHECK_THROWS_AS(
      Trajectory::sampled({0.0, 1.0, 2.0}, {0.0, 0.5, 0.0}), domain_error);
  CHECK_THROWS_AS(
      Trajectory::sampled({0.0, 1.0, 2.0}, {0.0, 0.5, -0.2}), domain_error);
}

TEST_CASE("negative velocities are flagged with a warning") {
  CHECK(Trajectory::constant(Beta(-0.3)).warnings().size() == 1);
  CHECK(Trajectory::constant(Beta(0.3)).warnings().empty());
  CHECK(Trajectory::piecewise({1.0}, {Beta(0.5), Beta(0.0)}).warnings().empty());
  CHECK(!Trajectory::sampled({0.0, 1.0, 2.0}, {0.0, -0.5, -0.9})
             .warnings()
             .empty());
}

TEST_CASE("light intersection solves the crossing event") {
  const Trajectory traj = Trajectory::constant(Beta(0.5));
  // frozen from the bisection oracle: 0.5 t = -1 + t  =>  t = 2
  const Event e = traj.light_intersection({-1.0, Direction::plus_x});
  CHECK(e.t == Catch::Approx(2.0).margin(1e-12));
  CHECK(e.x == Catch::Approx(1.0).margin(1e-12));
  CHECK(bisect_crossing(traj, -1.0, 1.0, 10.0) ==
        Catch::Approx(e.t).margin(1e-10));

  const Event origin = traj.light_intersection({0.0, Direction::plus_x});
  CHECK(origin.t == 0.0);
  CHECK(origin.x == 0.0);

  CHECK_THROWS_AS(traj.light_intersection({1.0, Direction::plus_x}),
                  no_intersection);
  CHECK_THROWS_AS(traj.light_intersection({-1.0, Direction::minus_x}),
                  no_intersection);
}

TEST_CASE("light intersection consistency across families") {
  std::mt19937_64 rng(42);
  const std::vector<Trajectory> trajectories = {
      Trajectory::constant(Beta(0.6)), Trajectory::constant(Beta(-0.4)),
      Trajectory::piecewise({2.0 / 3.0, 5.0 / 3.0},
                            {Beta(0.2), Beta(0.5), Beta(0.8)}),
      Trajectory::uniform_acceleration(1.0), wavy_sampled()};
  for (const auto& traj : trajectories) {
    for (Direction s : {Direction::plus_x, Direction::minus_x}) {
      const auto [lo, hi] = traj.crossed_chi_range(s);
      const double eff_lo = std::isinf(lo) ? -4.0 : 0.9 * lo;
      const double eff_hi = std::isinf(hi) ? 4.0 : 0.9 * hi;
      std::uniform_real_distribution<double> pick(eff_lo, eff_hi);
      for (int i = 0; i < 25; ++i) {
        const double chi = pick(rng);
        const Event e = traj.light_intersection({chi, s});
        const double resid = e.x - (chi + direction_sign(s) * e.t);
        CHECK(std::abs(resid) <= 1e-10 * std::max(1.0, std::abs(chi)));
      }
    }
  }
}

TEST_CASE("accelerating worldline outruns late light lines") {
  const Trajectory traj = Trajectory::uniform_acceleration(1.0);
  CHECK_NOTHROW(traj.light_intersection({-0.999, Direction::plus_x}));
  CHECK_THROWS_AS(traj.light_intersection({-1.0, Direction::plus_x}),
                  no_intersection);
  CHECK_THROWS_AS(traj.light_intersection({-5.0, Direction::plus_x}),
                  no_intersection);
  // the other propagation direction has no such bound
  CHECK_NOTHROW(traj.light_intersection({50.0, Direction::minus_x}));
}

TEST_CASE("sampled crossings beyond the recorded range are domain errors") {
  const Trajectory traj = Trajectory::sampled({0.0, 2.0}, {0.0, 1.0});
  CHECK_NOTHROW(traj.light_intersection({-0.5, Direction::plus_x}));
  // chi at t_max is 1 - 2 = -1; anything earlier crosses out of range
  CHECK_THROWS_AS(traj.light_intersection({-1.5, Direction::plus_x}),
                  domain_error);
}

TEST_CASE("beta at a light line") {
  const Trajectory cv = Trajectory::constant(Beta(0.6));
  for (double chi : {-3.0, -0.2})
    CHECK(cv.beta_at_chi({chi, Direction::plus_x}).value() == 0.6);

  const Trajectory accel = Trajectory::uniform_acceleration(1.0);
  CHECK(accel.beta_at_chi({0.0, Direction::plus_x}).value() == 0.0);
  // frozen closed case: crossing of chi = -1/2 happens at t = 3/4 where
  // v = 0.6 exactly; cross-checked with the bisection oracle
  const double t_oracle = bisect_crossing(accel, -0.5, 1.0, 10.0);
  CHECK(t_oracle == Catch::Approx(0.75).margin(1e-10));
  CHECK(accel.beta_at_chi({-0.5, Direction::plus_x}).value() ==
        Catch::Approx(0.6).margin(1e-12));
}

TEST_CASE("velocity on a light line extends only inertial worldlines") {
  const Trajectory cv = Trajectory::constant(Beta(0.6));
  CHECK(cv.velocity_on_line({5.0, Direction::plus_x}).value() == 0.6);
  CHECK(cv.velocity_on_line({-5.0, Direction::minus_x}).value() == 0.6);

  const Trajectory accel = Trajectory::uniform_acceleration(1.0);
  CHECK_THROWS_AS(accel.velocity_on_line({1.0, Direction::plus_x}),
                  no_intersection);
}

TEST_CASE("velocity magnitude stays below light speed everywhere") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pick_t(0.0, 9.5);
  const std::vector<Trajectory> trajectories = {
      Trajectory::constant(Beta(0.99)), Trajectory::uniform_acceleration(2.0),
      Trajectory::piecewise({1.0}, {Beta(-0.5), Beta(0.0)}), wavy_sampled()};
  for (const auto& traj : trajectories)
    for (int i = 0; i < 50; ++i)
      CHECK(std::abs(traj.velocity_at(pick_t(rng)).value()) < 1.0);
}
