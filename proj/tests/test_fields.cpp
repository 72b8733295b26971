#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "core/fields.hpp"
#include "core/geometry.hpp"
#include "oracles.hpp"

using namespace dislocate;

TEST_CASE("k field values") {
  CHECK(k_field({0, 0}, {1, 0}).x == doctest::Approx(0.0));
  CHECK(k_field({0, 0}, {1, 0}).y == doctest::Approx(1.0));
  CHECK(k_field({0, 0}, {0, 2}).x == doctest::Approx(-0.5));
  CHECK(k_field({0, 0}, {0, 2}).y == doctest::Approx(0.0));
  // Opposite unit tangents at the midpoint of two poles.
  const double dot = k_field({-1, 0}, {0, 0}).dot(k_field({1, 0}, {0, 0}));
  CHECK(dot == doctest::Approx(-1.0));
  CHECK_THROWS_AS(k_field({0.5, 0.5}, {0.5, 0.5}), InvalidArgument);
}

TEST_CASE("branch cut angles") {
  const BranchCut cut{{0, 0}, {1, 0}};
  CHECK(theta_branch(cut, {0, 1}) == doctest::Approx(kPi / 2));
  // Values just above/below the positive axis differ by 2*pi.
  const double above = theta_branch(cut, {1.0, 1e-12});
  const double below = theta_branch(cut, {1.0, -1e-12});
  CHECK(below - above == doctest::Approx(kTwoPi).epsilon(1e-9));
  CHECK_THROWS_AS(theta_branch(cut, {0.5, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(theta_branch(cut, {0.0, 0.0}), InvalidArgument);

  // Finite-difference gradient matches the field away from the cut.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double h = 1e-6;
  int checked = 0;
  while (checked < 100) {
    const Vec2 x{u(rng), u(rng)};
    if (x.norm() < 0.2) continue;
    if (std::abs(x.y) < 1e-2 && x.x > 0) continue;  // keep clear of the cut
    const Vec2 grad{(theta_branch(cut, {x.x + h, x.y}) - theta_branch(cut, {x.x - h, x.y})) /
                        (2 * h),
                    (theta_branch(cut, {x.x, x.y + h}) - theta_branch(cut, {x.x, x.y - h})) /
                        (2 * h)};
    const Vec2 k = k_field({0, 0}, x);
    CHECK((grad - k).norm() < 1e-6 * std::max(1.0, k.norm()));
    ++checked;
  }
}

TEST_CASE("annulus energy") {
  CHECK(annulus_k_energy(0.1, 1.0) == doctest::Approx(kTwoPi * std::log(10.0)));
  CHECK(annulus_k_energy(1.0 / std::exp(1.0), 1.0) == doctest::Approx(kTwoPi));
  CHECK(annulus_k_energy(0.01, 1.0) ==
        doctest::Approx(annulus_k_energy(0.01, 0.3) + annulus_k_energy(0.3, 1.0)));
  CHECK_THROWS_AS(annulus_k_energy(1.0, 0.5), InvalidArgument);
}

TEST_CASE("field energy in the domain") {
  const Domain disk = Domain::unit_disk();
  QuadratureSpec quad;

  SUBCASE("centered point gives the plain annulus") {
    const double e = k_energy_in_domain(disk, {0, 0}, 0.1, {}, quad);
    CHECK(e == doctest::Approx(kTwoPi * std::log(10.0)).epsilon(1e-9));
  }
  SUBCASE("off-center point against the midpoint oracle") {
    const Vec2 a{0.5, 0.0};
    const double got = k_energy_in_domain(disk, a, 0.01, {}, quad);
    const double oracle = oracles::midpoint_polar_disk(
        a, 0.01, {}, [&](Vec2 x) { return k_field(a, x).norm2(); }, 2000, 2000);
    CHECK(std::abs(got - oracle) < 1e-3 * std::abs(oracle));
  }
  SUBCASE("boundary point upper bound") {
    const double e = k_energy_in_domain(disk, {1.0, 0.0}, 0.01, {}, quad);
    CHECK(e <= kPi * std::abs(std::log(0.01)) + kPi * std::log(2.0) + 1e-9);
  }
  SUBCASE("exclusions reduce the energy") {
    const Vec2 a{0.3, 0.0};
    std::vector<Disk> excl{{{-0.3, 0.0}, 0.1}};
    const double with = k_energy_in_domain(disk, a, 0.05, excl, quad);
    const double without = k_energy_in_domain(disk, a, 0.05, {}, quad);
    CHECK(with < without);
    const double oracle = oracles::midpoint_polar_disk(
        a, 0.05, excl, [&](Vec2 x) { return k_field(a, x).norm2(); }, 2000, 2000);
    CHECK(std::abs(with - oracle) < 2e-3 * std::abs(oracle));
  }
}

TEST_CASE("sign structure and pair integrals") {
  const Domain disk = Domain::unit_disk();
  QuadratureSpec quad;
  quad.rel_tol = 1e-6;

  SUBCASE("right-angle criterion probes") {
    const Vec2 y1{-0.5, 0.0}, y2{0.5, 0.0};
    CHECK(k_field(y1, {0, 0}).dot(k_field(y2, {0, 0})) < 0.0);
    CHECK(std::abs(k_field(y1, {0.0, 0.5}).dot(k_field(y2, {0.0, 0.5}))) < 1e-10);
    CHECK(k_field(y1, {0.0, 1.0}).dot(k_field(y2, {0.0, 1.0})) > 0.0);
  }
  SUBCASE("mid-circle integral stays in [-2 pi, 0]") {
    const Vec2 y1{-0.5, 0.0}, y2{0.5, 0.0};
    const double v = k_dot_integral(y1, y2, Disk{{0, 0}, 0.5}, quad);
    CHECK(v >= -kTwoPi - 1e-6);
    CHECK(v <= 1e-6);
  }
  SUBCASE("unit disk pair integral against two oracles") {
    const Vec2 y1{-0.5, 0.0}, y2{0.5, 0.0};
    const double got = k_dot_integral(y1, y2, Region{&disk}, quad);
    auto f = [&](Vec2 x) { return k_field(y1, x).dot(k_field(y2, x)); };
    // Midpoint sums desingularized about each pole: split along the
    // perpendicular bisector (x = 0) and integrate each half about its pole.
    const double left = oracles::midpoint_polar_disk(
        y1, 1e-9, {}, [&](Vec2 x) { return x.x < 0.0 ? f(x) : 0.0; }, 3000, 3000);
    const double right = oracles::midpoint_polar_disk(
        y2, 1e-9, {}, [&](Vec2 x) { return x.x >= 0.0 ? f(x) : 0.0; }, 3000, 3000);
    const double oracle = left + right;
    CHECK(std::abs(got - oracle) < 5e-3 * std::max(1.0, std::abs(oracle)));
    // Cross-check via the boundary reduction of grad log . grad log.
    double reduced = -kTwoPi * std::log(distance(y1, y2));
    const int m = 4096;
    for (int j = 0; j < m; ++j) {
      const double phi = (j + 0.5) * kTwoPi / m;
      const Vec2 x{std::cos(phi), std::sin(phi)};
      const Vec2 rb = x - y2;
      reduced += std::log((x - y1).norm()) * x.dot(rb) / rb.norm2() * kTwoPi / m;
    }
    CHECK(std::abs(got - reduced) < 1e-4 * std::max(1.0, std::abs(reduced)));
  }
}

TEST_CASE("pair integral bounds on random pairs") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  QuadratureSpec quad;
  quad.rel_tol = 1e-5;
  for (int t = 0; t < 25; ++t) {
    const Vec2 y1{u(rng), u(rng)};
    Vec2 y2{u(rng), u(rng)};
    if ((y1 - y2).norm() < 0.05) y2 = y1 + Vec2{0.2, 0.15};
    const Vec2 mid = 0.5 * (y1 + y2);
    const double r = 0.5 * (y1 - y2).norm();
    const double v = k_dot_integral(y1, y2, Disk{mid, r}, quad);
    CHECK(v >= -kTwoPi - 1e-3);
    CHECK(v <= 1e-3);
    const double own = k_dot_integral(y1, y2, Disk{y1, r}, quad);
    CHECK(own <= kTwoPi + 1e-3);
  }
}
