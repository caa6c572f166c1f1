#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "viaduct/core.hpp"
#include "viaduct/error.hpp"

using namespace viaduct;

TEST_CASE("duration laws") {
  CHECK(duration_value({-1, 1.0, 2.0}, 0.0) == 2.0);
  CHECK(duration_value({-1, 1.0, 2.0}, 2.0) == 0.0);
  CHECK(duration_value({+1, 2.0, 4.0}, 3.0) == 2.0);
  CHECK(duration_value({0, 1.0, 5.0}, 7.0) == 0.0);
}

TEST_CASE("duration laws vanish exactly at the aperture and are monotone") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> phi(0.1, 5.0), dur(0.0, 10.0), t(-20.0, 20.0);
  for (int i = 0; i < 500; ++i) {
    const double f = phi(rng), D = dur(rng);
    const double om = aperture(D, f);
    CHECK(duration_value({-1, f, D}, om) <= 1e-12 * std::max(1.0, D));
    CHECK(duration_value({+1, f, D}, om) <= 1e-12 * std::max(1.0, D));
    double a = t(rng), b = t(rng);
    if (a > b) std::swap(a, b);
    CHECK(duration_value({-1, f, D}, a) >= duration_value({-1, f, D}, b));
    CHECK(duration_value({+1, f, D}, a) <= duration_value({+1, f, D}, b));
    for (int s : {-1, 0, 1}) CHECK(duration_value({s, f, D}, a) >= 0.0);
  }
}

TEST_CASE("aperture") {
  CHECK(aperture(2.0, 1.0) == 2.0);
  CHECK(aperture(0.0, 3.0) == 0.0);
  CHECK(aperture(3.0, 1.5) == 2.0);
  try {
    aperture(1.0, 0.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_fluidity);
  }
  CHECK_THROWS_AS((aperture(1.0, -2.0)), Error);
}

TEST_CASE("fluidities must be positive and finite") {
  CHECK_NOTHROW((Fluidities{1.0, 2.0}.validate()));
  CHECK_THROWS_AS((Fluidities{0.0, 1.0}.validate()), Error);
  CHECK_THROWS_AS((Fluidities{1.0, INFINITY}.validate()), Error);
}

TEST_CASE("spatial junction detector") {
  const std::vector<Vec> zero{{0.0}}, two{{0.0}, {5.0}};
  CHECK(spatial_detector(zero, Vec{3.0}) == 3.0);
  CHECK(spatial_detector(two, Vec{5.0}) == 0.0);
  CHECK(spatial_detector(two, Vec{4.0}) == 1.0);
  try {
    spatial_detector({}, Vec{1.0});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::no_junction);
  }
}

TEST_CASE("detector is zero exactly on junction positions") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 200; ++i) {
    std::vector<Vec> j{{u(rng), u(rng)}, {u(rng), u(rng)}};
    CHECK(spatial_detector(j, j[1]) <= 1e-12);
    Vec p{u(rng), u(rng)};
    if (p != j[0] && p != j[1]) CHECK(spatial_detector(j, p) > 0.0);
  }
}

TEST_CASE("traffic states reject negative durations and wrong shapes") {
  CHECK_NOTHROW((TrafficState{0, 1, {0}, {0}}.validate(1, 1)));
  CHECK_THROWS_AS((TrafficState{0, -1, {0}, {0}}.validate(1, 1)), Error);
  CHECK_THROWS_AS((TrafficState{0, 1, {0, 1}, {0}}.validate(1, 1)), Error);
  CHECK_THROWS_AS((TrafficState{NAN, 1, {0}, {0}}.validate(1, 1)), Error);
  CHECK_THROWS_AS((TransportState{{1, 0, {0}, {0}}, {0, 0, {0}, {0}}}.validate(1, 1)), Error);
}

TEST_CASE("clamped step counts and aperture matching") {
  CHECK(steps_to_zero(0.1, 1.0, 0.5, 0.125) == 0);
  CHECK(steps_to_zero(2.0, 1.0, 0.5, 0.125) == 4);
  CHECK(steps_to_zero(1.75, 1.0, 0.5, 0.125) == 4);
  CHECK(steps_to_zero(2.0, 2.0, 0.5, 0.125) == 2);
  const Fluidities fl{1.0, 1.0};
  CHECK(apertures_match(2.0, 2.0, fl, 0.5, 0.125, 0.25));
  CHECK_FALSE(apertures_match(2.0, 1.0, fl, 0.5, 0.125, 0.25));
  CHECK(apertures_match(2.0, 4.0, {1.0, 2.0}, 0.5, 0.125, 0.25));
}
