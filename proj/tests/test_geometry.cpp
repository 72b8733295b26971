#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "core/datum.hpp"
#include "core/geometry.hpp"

using namespace dislocate;

namespace {

// Ellipse sample table with cumulative arclength computed by fine summation.
std::vector<std::array<double, 3>> ellipse_samples(double a, double b, int n) {
  std::vector<std::array<double, 3>> rows;
  rows.reserve(n);
  const int fine = 64;
  double s = 0.0;
  Vec2 prev{a, 0.0};
  for (int i = 0; i < n; ++i) {
    rows.push_back({s, prev.x, prev.y});
    for (int k = 1; k <= fine; ++k) {
      const double t = kTwoPi * (i + static_cast<double>(k) / fine) / n;
      const Vec2 next{a * std::cos(t), b * std::sin(t)};
      s += distance(prev, next);
      prev = next;
    }
  }
  return rows;
}

}  // namespace

TEST_CASE("unit disk basics") {
  const Domain disk = Domain::unit_disk();
  CHECK(disk.point_at(0.0).x == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(disk.point_at(0.0).y == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(disk.normal_at(0.0).x == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(disk.diameter() == doctest::Approx(2.0));
  CHECK(disk.contains({0.5, 0.0}));
  CHECK_FALSE(disk.contains({1.5, 0.0}));
  CHECK(disk.cone_angle() > 0.5 * kPi);
  CHECK(disk.cone_angle() < kPi);
}

TEST_CASE("boundary distance") {
  const Domain disk = Domain::unit_disk();
  CHECK(disk.boundary_distance({0.3, 0.4}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(disk.boundary_distance({0.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-14));

  // dist + |x| = radius for interior points.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.99, 0.99);
  for (int t = 0; t < 200; ++t) {
    const Vec2 p{u(rng), u(rng)};
    if (p.norm() >= 1.0) continue;
    CHECK(std::abs(disk.boundary_distance(p) + p.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("parametrized ellipse") {
  const auto rows = ellipse_samples(1.2, 0.8, 4096);
  const Domain ellipse = Domain::from_boundary_samples(rows, 0.75 * kPi, 0.2);
  const double spacing = ellipse.length() / 4096;

  // A boundary point is at distance ~0 (within the sample spacing).
  const Vec2 on_boundary{1.2, 0.0};
  CHECK(ellipse.boundary_distance(on_boundary) < spacing);

  CHECK(ellipse.contains({0.0, 0.0}));
  CHECK_FALSE(ellipse.contains({1.3, 0.0}));
  CHECK(ellipse.diameter() == doctest::Approx(2.4).epsilon(1e-2));

  // Ray exits agree with the implicit equation.
  const double exit = ellipse.ray_exit({0.0, 0.0}, {1.0, 0.0});
  CHECK(exit == doctest::Approx(1.2).epsilon(1e-3));

  // Non-convex input is rejected.
  auto bad = rows;
  bad[100][1] *= 0.2;
  bad[100][2] *= 0.2;
  CHECK_THROWS_AS(Domain::from_boundary_samples(bad, 0.75 * kPi, 0.2), InvalidArgument);
}

TEST_CASE("separation radii") {
  const Domain disk = Domain::unit_disk();
  SUBCASE("pair") {
    const std::vector<Vec2> pts{{0.0, 0.0}, {0.5, 0.0}};
    const auto d = separation_radii(disk, pts);
    CHECK(d[0] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(d[1] == doctest::Approx(0.25).epsilon(1e-14));
  }
  SUBCASE("single point convention") {
    const std::vector<Vec2> pts{{0.0, 0.0}};
    CHECK(separation_radii(disk, pts)[0] == doctest::Approx(1.0));
  }
  SUBCASE("boundary dominates") {
    const std::vector<Vec2> pts{{0.9, 0.0}, {-0.9, 0.0}};
    const auto d = separation_radii(disk, pts);
    CHECK(d[0] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(d[1] == doctest::Approx(0.1).epsilon(1e-12));
  }
  SUBCASE("coincident points error") {
    const std::vector<Vec2> pts{{0.1, 0.2}, {0.1, 0.2}};
    CHECK_THROWS_AS(separation_radii(disk, pts), InvalidArgument);
  }
  SUBCASE("permutation and rotation equivariance") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.7, 0.7);
    for (int t = 0; t < 20; ++t) {
      std::vector<Vec2> pts{{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
      const auto d = separation_radii(disk, pts);
      std::vector<Vec2> perm{pts[2], pts[0], pts[1]};
      const auto dp = separation_radii(disk, perm);
      CHECK(dp[0] == d[2]);
      CHECK(dp[1] == d[0]);
      const double c = std::cos(0.7), s = std::sin(0.7);
      std::vector<Vec2> rot;
      for (const auto& p : pts) rot.push_back({c * p.x - s * p.y, s * p.x + c * p.y});
      const auto dr = separation_radii(disk, rot);
      for (int i = 0; i < 3; ++i) CHECK(dr[i] == doctest::Approx(d[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("arc order on the disk") {
  const Domain disk = Domain::unit_disk();
  const Vec2 base{1.0, 0.0};
  auto at = [](double phi) { return Vec2{std::cos(phi), std::sin(phi)}; };
  CHECK(arc_precedes(disk, base, at(kPi / 4), at(kPi / 2)));
  CHECK_FALSE(arc_precedes(disk, base, at(1.5 * kPi), at(kPi / 2)));
  CHECK(arc_precedes(disk, base, at(0.3), at(0.3)));  // reflexive
  CHECK_THROWS_AS(arc_precedes(disk, base, {0.2, 0.2}, at(1.0)), InvalidArgument);
}

TEST_CASE("primitive construction") {
  const Domain disk = Domain::unit_disk();
  SUBCASE("uniform strain, jump at pi") {
    const BoundaryDatum d = build_primitive(
        disk, [](double) { return 1.0; }, {1.0, 0.0}, {{{-1.0, 0.0}, 1}});
    CHECK(d.total() == 1);
    CHECK(d.g(kPi / 2) == doctest::Approx(kPi / 2).epsilon(1e-9));
    CHECK(d.g(1.5 * kPi) == doctest::Approx(-kPi / 2).epsilon(1e-9));
    // Jump by 2*pi at the jump point.
    const double below = d.g(kPi - 1e-7);
    const double above = d.g(kPi + 1e-7);
    CHECK(below - above == doctest::Approx(kTwoPi).epsilon(1e-5));
    // g(base+) = 0.
    CHECK(d.g(1e-9) == doctest::Approx(0.0).epsilon(1e-6));
  }
  SUBCASE("double jump amplitude") {
    const BoundaryDatum d = build_primitive(
        disk, [](double) { return 2.0; }, {1.0, 0.0}, {{{-1.0, 0.0}, 2}});
    CHECK(d.total() == 2);
    const double below = d.g(kPi - 1e-7);
    const double above = d.g(kPi + 1e-7);
    CHECK(below - above == doctest::Approx(2 * kTwoPi).epsilon(1e-5));
  }
  SUBCASE("circulation closure") {
    // Total jump amplitude must equal the circulation; a mismatched jump list
    // is rejected.
    CHECK_THROWS_AS(build_primitive(
                        disk, [](double) { return 1.0; }, {1.0, 0.0},
                        {{{-1.0, 0.0}, 2}}),
                    InvalidArgument);
  }
  SUBCASE("base change shifts g by a constant") {
    auto f = [](double s) { return 1.0 + 0.3 * std::sin(s); };
    const BoundaryDatum da =
        build_primitive(disk, f, {1.0, 0.0}, {{{-1.0, 0.0}, 1}}, 1e-6);
    const BoundaryDatum db =
        build_primitive(disk, f, {0.0, 1.0}, {{{-1.0, 0.0}, 1}}, 1e-6);
    const double shift = da.g(0.1) - db.g(0.1);
    for (double s : {0.5, 2.0, 2.8, 4.0, 5.5}) {
      CHECK(da.g(s) - db.g(s) == doctest::Approx(shift).epsilon(1e-7));
    }
  }
  SUBCASE("total variation equals the strain circulation for f >= 0") {
    const BoundaryDatum d = BoundaryDatum::preset_g2(disk);
    CHECK(d.total_variation() == doctest::Approx(kTwoPi).epsilon(1e-9));
  }
}

TEST_CASE("g2 preset matches its quadrant form") {
  const Domain disk = Domain::unit_disk();
  const BoundaryDatum g2 = BoundaryDatum::preset_g2(disk);
  CHECK(g2.total() == 1);
  CHECK(g2.g(0.3) == doctest::Approx(0.6).epsilon(1e-12));         // 2*theta
  CHECK(g2.g(kPi) == doctest::Approx(kPi).epsilon(1e-12));         // plateau
  CHECK(g2.g(1.8 * kPi) == doctest::Approx(1.6 * kPi).epsilon(1e-12));  // 2*theta - 2*pi
  // Mirror symmetry across the x axis: g2(-phi) = const - g2(phi).
  for (double phi : {0.3, 1.1, 2.5, 3.0}) {
    CHECK(g2.g(kTwoPi - phi) + g2.g(phi) == doctest::Approx(kTwoPi).epsilon(1e-12));
  }
}

TEST_CASE("configurations fold multiplicities") {
  const Domain disk = Domain::unit_disk();
  const std::vector<Vec2> raw{{0.0, 0.0}, {0.5, 0.0}, {0.0, 0.0}};
  const Config cfg = Config::from_points(disk, raw);
  CHECK(cfg.total() == 3);
  CHECK(cfg.distinct() == 2);
  CHECK(cfg.points()[0].multiplicity == 2);
  CHECK_FALSE(cfg.all_simple_interior(disk));
}

TEST_CASE("domain file round trip") {
  const std::string dir = "geometry_io_tmp";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir + "/disk.txt");
    f << "kind = disk\nradius = 2.0\n";
  }
  const Domain disk = Domain::load(dir + "/disk.txt");
  CHECK(disk.disk_radius() == doctest::Approx(2.0));
  CHECK(disk.diameter() == doctest::Approx(4.0));

  {
    std::ofstream f(dir + "/samples.csv");
    f << "s,x,y\n";
    f.precision(17);
    for (const auto& row : ellipse_samples(1.0, 0.7, 2048)) {
      f << row[0] << "," << row[1] << "," << row[2] << "\n";
    }
    std::ofstream g(dir + "/ellipse.txt");
    g << "kind = convex\nboundary_samples = " << dir << "/samples.csv\n";
    g << "cone_angle = 2.0\ncone_radius = 0.3\n";
  }
  const Domain ellipse = Domain::load(dir + "/ellipse.txt");
  CHECK(ellipse.contains({0.0, 0.0}));
  CHECK(ellipse.cone_angle() == doctest::Approx(2.0));
}
