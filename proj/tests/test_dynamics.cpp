#include <doctest.h>

#include <cmath>
#include <random>

#include "viaduct/dynamics.hpp"
#include "viaduct/error.hpp"

using namespace viaduct;

namespace {

TrafficState s1(double t, double d, double p, double x) { return {t, d, {p}, {x}}; }

}  // namespace

TEST_CASE("surge samples") {
  const TrafficState s = s1(0, 1, 0, 2);
  std::vector<Vec> out;
  SurgeField::constant_field({0}).samples(s, out);
  CHECK(out == std::vector<Vec>{{0}});
  SurgeField::interval_field({-1}, {1}, 3).samples(s, out);
  CHECK(out == std::vector<Vec>{{-1}, {0}, {1}});
  SurgeField aff;
  aff.kind = SurgeKind::affine;
  aff.offset = {0};
  aff.coef_t = {0};
  aff.coef_d = {0};
  aff.coef_p = {{0}};
  aff.coef_x = {{-1}};
  aff.samples(s, out);
  CHECK(out == std::vector<Vec>{{-2}});
}

TEST_CASE("interval lattices are endpoint inclusive products") {
  std::vector<Vec> out;
  const SurgeField f = SurgeField::interval_field({0, 10}, {1, 12}, 3);
  f.samples(s1(0, 0, 0, 0), out);
  CHECK(f.sample_count() == 9);
  CHECK(out.size() == 9);
  CHECK(out.front() == Vec{0, 10});
  CHECK(out.back() == Vec{1, 12});
  CelerityBounds c{{1}, {2}, 3};
  CHECK(c.lattice() == std::vector<Vec>{{1}, {1.5}, {2}});
  CHECK_THROWS_AS((CelerityBounds{{2}, {1}, 3}.validate(1)), Error);
  CHECK_THROWS_AS((CelerityBounds{{1}, {2}, 1}.validate(1)), Error);
}

TEST_CASE("surge samples outside the grid are bounds errors") {
  const GridSpec g = GridSpec::traffic({AxisRole::time, 0, 0, 1, 2}, {AxisRole::duration, 0, 0, 1, 2},
                                       {{AxisRole::position, 0, 0, 1, 2}}, {{AxisRole::monad, 0, 0, 1, 2}});
  CHECK(surge_samples(SurgeField::constant_field({0}), s1(0, 0, 0, 0), g).size() == 1);
  try {
    surge_samples(SurgeField::constant_field({0}), s1(5, 0, 0, 0), g);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::bounds);
  }
}

TEST_CASE("incoming Euler step") {
  CHECK(euler_step_incoming(s1(0, 1, 0, 0), Vec{1}, Vec{0}, 0.5, 1) == s1(0.5, 0.5, 0.5, 0));
  CHECK(euler_step_incoming(s1(0, 0.2, 0, 0), Vec{0}, Vec{0}, 0.5, 1) == s1(0.5, 0, 0, 0));
  CHECK(euler_step_incoming(s1(0, 1, 2, 3), Vec{0}, Vec{0}, 1, 1) == s1(1, 0, 2, 3));
}

TEST_CASE("auxiliary step signs") {
  const AuxPair a{s1(0, 1, 0, 0), s1(0, 1, 0, 0)};
  const AuxPair b = aux_step(a, Vec{1}, Vec{1}, Vec{0}, Vec{0}, 1, {1, 1});
  CHECK(b.in == s1(1, 0, 1, 0));
  CHECK(b.ou == s1(-1, 0, -1, 0));
  const AuxPair c = aux_step(a, Vec{0}, Vec{0}, Vec{0}, Vec{2}, 0.5, {1, 1});
  CHECK(c.ou.x[0] == -1);
  CHECK_THROWS_AS((aux_step(a, Vec{0}, Vec{0}, Vec{0}, Vec{0}, 0.0, {1, 1})), Error);
}

TEST_CASE("small steps stay close to the state") {
  const AuxPair a{s1(0, 1, 0, 0), s1(0, 1, 0, 0)};
  for (double h : {1e-2, 1e-4, 1e-6}) {
    const AuxPair b = aux_step(a, Vec{2}, Vec{2}, Vec{3}, Vec{3}, h, {1, 1});
    CHECK(std::abs(b.in.p[0] - a.in.p[0]) <= 3 * h);
    CHECK(std::abs(b.ou.x[0] - a.ou.x[0]) <= 3 * h);
    CHECK(std::abs(b.ou.t - a.ou.t) <= 3 * h);
  }
}

TEST_CASE("incoming half of the auxiliary step is the incoming Euler step") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-3, 3), pos(0, 3);
  for (int i = 0; i < 500; ++i) {
    const AuxPair a{s1(u(rng), pos(rng), u(rng), u(rng)), s1(u(rng), pos(rng), u(rng), u(rng))};
    const Vec c{u(rng)}, f{u(rng)};
    const double h = 0.01 + pos(rng);
    const Fluidities fl{0.5 + pos(rng), 0.5 + pos(rng)};
    const AuxPair b = aux_step(a, c, Vec{u(rng)}, f, Vec{u(rng)}, h, fl);
    CHECK(b.in == euler_step_incoming(a.in, c, f, h, fl.phi_in));
    CHECK(b.in.d >= 0.0);
    CHECK(b.ou.d >= 0.0);
  }
}

TEST_CASE("constant celerity integrates exactly") {
  TrafficState s = s1(0, 100, 0.25, 0);
  for (int k = 1; k <= 16; ++k) {
    s = euler_step_incoming(s, Vec{0.5}, Vec{0}, 0.25, 1);
    CHECK(s.p[0] == 0.25 + k * 0.25 * 0.5);
  }
}

TEST_CASE("reversing an auxiliary outgoing leg") {
  SampledLeg one{{0.0}, {s1(3, 0, 1, 0)}, {}};
  const SampledLeg r1 = reverse_outgoing(one, 3);
  CHECK(r1.time == std::vector<double>{3});
  CHECK(r1.states == one.states);

  SampledLeg two{{0.0, 0.5}, {s1(2, 1, 8, 0), s1(1.5, 0.5, 7, 0)}, {{2}}};
  const SampledLeg r2 = reverse_outgoing(two, 2);
  CHECK(r2.time == std::vector<double>{1.5, 2});
  CHECK(r2.states.front() == two.states.back());
  CHECK(r2.celerity == two.celerity);
  CHECK(reverse_outgoing(r2, 2) == two);
  try {
    reverse_outgoing(SampledLeg{}, 0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::empty_input);
  }
}

TEST_CASE("reversal is an involution on random legs") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 100; ++i) {
    SampledLeg leg;
    const std::size_t n = 1 + rng() % 10;
    for (std::size_t k = 0; k < n; ++k) {
      leg.time.push_back(0.25 * double(k));
      leg.states.push_back(s1(u(rng), std::abs(u(rng)), u(rng), u(rng)));
      if (k + 1 < n) leg.celerity.push_back({u(rng)});
    }
    const double t_ou = u(rng);
    const SampledLeg r = reverse_outgoing(leg, t_ou);
    CHECK(r.size() == leg.size());
    for (std::size_t k = 1; k < r.size(); ++k) CHECK(r.time[k] > r.time[k - 1]);
    const SampledLeg back = reverse_outgoing(r, t_ou);
    CHECK(back.states == leg.states);
    CHECK(back.celerity == leg.celerity);
    for (std::size_t k = 0; k < n; ++k) CHECK(back.time[k] == doctest::Approx(leg.time[k]).epsilon(1e-12));
  }
}
