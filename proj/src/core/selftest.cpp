#include "core/selftest.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>

#include "core/energy.hpp"
#include "core/fields.hpp"
#include "core/harmonic.hpp"
#include "core/optimize.hpp"
#include "core/quad.hpp"

namespace dislocate {

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

Vec2 random_in_disk(std::mt19937_64& rng, double rmax) {
  std::uniform_real_distribution<double> u(-rmax, rmax);
  for (;;) {
    const Vec2 p{u(rng), u(rng)};
    if (p.norm() < rmax) return p;
  }
}

Check field_identities() {
  Check c;
  std::mt19937_64 rng(101);
  // Circulation of K around circles.
  for (int t = 0; t < 8; ++t) {
    const Vec2 a = random_in_disk(rng, 0.8);
    const double r = 0.05 + 0.2 * t / 8.0;
    double circ = 0.0;
    const int m = 4096;
    for (int j = 0; j < m; ++j) {
      const double phi = (j + 0.5) * kTwoPi / m;
      const Vec2 tau{-std::sin(phi), std::cos(phi)};
      circ += k_field(a, a + r * Vec2{std::cos(phi), std::sin(phi)}).dot(tau) * r;
    }
    circ *= kTwoPi / m;
    c.expect(std::abs(circ - kTwoPi) < 1e-8, fmt::format("circulation {}", circ));
  }
  // Divergence-free by finite differences.
  const double h = 1e-4;
  for (int t = 0; t < 64; ++t) {
    const Vec2 a = random_in_disk(rng, 0.5);
    Vec2 x = random_in_disk(rng, 1.0);
    if ((x - a).norm() < 0.1) x = a + Vec2{0.3, 0.2};
    const double div = (k_field(a, x + Vec2{h, 0}).x - k_field(a, x - Vec2{h, 0}).x +
                        k_field(a, x + Vec2{0, h}).y - k_field(a, x - Vec2{0, h}).y) /
                       (2 * h);
    c.expect(std::abs(div) < 1e-5, fmt::format("divergence {}", div));
  }
  // Sign structure of K1 . K2 against the mid-circle.
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 10000; ++t) {
    const Vec2 y1{u(rng), u(rng)}, y2{u(rng), u(rng)};
    if ((y1 - y2).norm() < 1e-3) continue;
    const Vec2 x{u(rng), u(rng)};
    if ((x - y1).norm() < 1e-6 || (x - y2).norm() < 1e-6) continue;
    const Vec2 y = 0.5 * (y1 + y2);
    const double r = 0.5 * (y1 - y2).norm();
    const double lhs = k_field(y1, x).dot(k_field(y2, x));
    const double rhs = (x - y).norm2() - r * r;
    if (std::abs(rhs) > 1e-12) {
      c.expect(lhs * rhs > 0.0, "sign mismatch against the mid-circle");
    }
  }
  // Annulus additivity.
  c.expect(std::abs(annulus_k_energy(0.01, 1.0) - annulus_k_energy(0.01, 0.2) -
                    annulus_k_energy(0.2, 1.0)) < 1e-12,
           "annulus additivity");
  return c;
}

Check k_integral_bounds() {
  Check c;
  std::mt19937_64 rng(202);
  QuadratureSpec quad;
  quad.rel_tol = 1e-5;
  const Domain disk = Domain::unit_disk();
  for (int t = 0; t < 30; ++t) {
    const Vec2 y1 = random_in_disk(rng, 0.85);
    Vec2 y2 = random_in_disk(rng, 0.85);
    if ((y1 - y2).norm() < 0.05) y2 = y1 + Vec2{0.3, 0.1};
    const Vec2 mid = 0.5 * (y1 + y2);
    const double r = 0.5 * (y1 - y2).norm();
    const double mid_disk = k_dot_integral(y1, y2, Disk{mid, r}, quad);
    c.expect(mid_disk >= -kTwoPi - 1e-3 && mid_disk <= 1e-3,
             fmt::format("mid-circle integral {}", mid_disk));
    const double own = k_dot_integral(y1, y2, Disk{y1, r}, quad);
    c.expect(own <= kTwoPi + 1e-3, fmt::format("own-circle integral {}", own));
  }
  // Sandwich bounds for the field energy, interior and boundary points.
  for (int t = 0; t < 12; ++t) {
    std::vector<Vec2> pts{random_in_disk(rng, 0.9), random_in_disk(rng, 0.9)};
    if ((pts[0] - pts[1]).norm() < 0.05) continue;
    const auto d = separation_radii(disk, pts);
    const double eps = 0.3 * std::min(d[0], d[1]);
    for (int i = 0; i < 2; ++i) {
      std::vector<Disk> excl;
      excl.push_back({pts[1 - i], eps});
      const double e = k_energy_in_domain(disk, pts[i], eps, excl, quad);
      const double lo = kTwoPi * std::abs(std::log(eps)) + kTwoPi * std::log(d[i]);
      const double hi =
          kTwoPi * std::abs(std::log(eps)) + kTwoPi * std::log(disk.diameter());
      c.expect(e >= lo - 1e-6 && e <= hi + 1e-6,
               fmt::format("interior sandwich {} not in [{}, {}]", e, lo, hi));
    }
  }
  for (int t = 0; t < 6; ++t) {
    std::uniform_real_distribution<double> uphi(0.0, kTwoPi);
    const double phi = uphi(rng);
    const Vec2 b{std::cos(phi), std::sin(phi)};
    const double eps = 0.005 + 0.01 * t;
    const double e = k_energy_in_domain(disk, b, eps, {}, quad);
    const double hi = kPi * std::abs(std::log(eps)) + kPi * std::log(disk.diameter());
    const double alpha = disk.cone_angle();
    const double lo = alpha * std::abs(std::log(eps)) + alpha * std::log(disk.cone_radius());
    c.expect(e <= hi + 1e-6 && e >= lo - 1e-6,
             fmt::format("boundary sandwich {} not in [{}, {}]", e, lo, hi));
  }
  return c;
}

Check solver_oracles() {
  Check c;
  const Domain disk = Domain::unit_disk();
  // Exterior log source reproduction.
  const Vec2 src{2.0, 0.0};
  BoundaryFunc datum{[&](double s) { return std::log((disk.point_at(s) - src).norm()); }, {}};
  const HarmonicSolution u = solve_dirichlet(disk, datum);
  c.expect(std::abs(u.evaluate({0, 0}) - std::log(2.0)) < 1e-8, "exterior source value");
  std::mt19937_64 rng(303);
  for (int t = 0; t < 50; ++t) {
    const Vec2 x = random_in_disk(rng, 0.95);
    c.expect(std::abs(u.evaluate(x) - std::log((x - src).norm())) < 1e-8,
             "exterior source reproduction");
  }
  // MFS vs Fourier cross-validation on random smooth data.
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  for (int t = 0; t < 3; ++t) {
    std::vector<double> a(6), b(6);
    for (int k = 0; k < 6; ++k) {
      a[k] = amp(rng);
      b[k] = amp(rng);
    }
    BoundaryFunc smooth{[a, b](double s) {
                          double v = 0.0;
                          for (int k = 0; k < 6; ++k) {
                            v += a[k] * std::cos((k + 1) * s) + b[k] * std::sin((k + 1) * s);
                          }
                          return v;
                        },
                        {}};
    SolverOpts mfs_opts;
    mfs_opts.prefer_mfs = true;
    const HarmonicSolution uf = solve_dirichlet(disk, smooth);
    const HarmonicSolution um = solve_dirichlet(disk, smooth, mfs_opts);
    for (int p = 0; p < 50; ++p) {
      const Vec2 x = random_in_disk(rng, 0.9);
      c.expect(std::abs(uf.evaluate(x) - um.evaluate(x)) < 1e-7, "MFS vs series value");
      c.expect((uf.gradient(x) - um.gradient(x)).norm() < 1e-7, "MFS vs series gradient");
    }
    // Maximum principle.
    double lo = 1e300, hi = -1e300;
    for (int j = 0; j < 512; ++j) {
      const double v = smooth.value(disk.length() * (j + 0.5) / 512);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    for (int p = 0; p < 100; ++p) {
      const double v = uf.evaluate(random_in_disk(rng, 0.999));
      c.expect(v > lo - 1e-6 && v < hi + 1e-6, "maximum principle");
    }
    // Mean value property.
    const Vec2 cpt = random_in_disk(rng, 0.3);
    const double avg = periodic_trapezoid(
                           [&](double phi) {
                             return uf.evaluate(cpt + 0.25 * Vec2{std::cos(phi),
                                                                  std::sin(phi)});
                           },
                           kTwoPi, 512) /
                       kTwoPi;
    c.expect(std::abs(avg - uf.evaluate(cpt)) < 1e-8, "mean value property");
  }
  return c;
}

Check energy_identities() {
  Check c;
  const Domain disk = Domain::unit_disk();
  QuadratureSpec quad;

  // Centered dislocation is exactly zero.
  {
    const auto g1 = BoundaryDatum::preset_g1(disk);
    const Config center = Config::from_points(disk, std::vector<Vec2>{{0, 0}});
    c.expect(std::abs(renormalized_energy(disk, g1, center, quad).total) < 1e-10,
             "centered limit energy");
    for (double eps : {0.1, 0.05, 0.01}) {
      c.expect(std::abs(core_energy(disk, g1, center, eps, quad).total) < 1e-8,
               "centered core energy");
    }
  }
  // Double dislocation at the center vs the single-point identity.
  {
    const auto g2n = BoundaryDatum::preset_const(disk, 2);
    const Config twice = Config::from_points(disk, std::vector<Vec2>{{0, 0}, {0, 0}});
    const double eps = 0.1;
    const double expected = 2.0 * kPi * std::abs(std::log(eps));
    const double got = core_energy(disk, g2n, twice, eps, quad).total;
    c.expect(std::abs(got - expected) < 1e-8,
             fmt::format("stacked-core identity {} vs {}", got, expected));
  }
  // Monotonicity in the core radius.
  std::mt19937_64 rng(404);
  const auto f2 = BoundaryDatum::preset_const(disk, 2);
  for (int t = 0; t < 3; ++t) {
    Vec2 a = random_in_disk(rng, 0.5);
    Vec2 b = random_in_disk(rng, 0.5);
    if ((a - b).norm() < 0.25) b = a + Vec2{0.3, 0.12};
    const Config cfg = Config::from_points(disk, std::vector<Vec2>{a, b});
    if (cfg.min_radius() < 0.12) continue;
    const double e_small = core_energy(disk, f2, cfg, 0.02, quad).total +
                           2 * kPi * std::abs(std::log(0.02));
    const double e_large = core_energy(disk, f2, cfg, 0.05, quad).total +
                           2 * kPi * std::abs(std::log(0.05));
    c.expect(e_small >= e_large - 1e-6,
             fmt::format("monotone energies {} < {}", e_small, e_large));
  }
  // Decomposition identity at finite core radius.
  {
    const Config cfg = Config::from_points(disk, std::vector<Vec2>{{0.4, 0}, {-0.4, 0}});
    const double eps = 0.05;
    const double full = core_energy(disk, f2, cfg, eps, quad).total;
    double sum = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
      sum += single_core_renormalized(disk, f2, cfg, eps, i, quad);
      sum += remainder_eps(disk, f2, cfg, eps, i, quad);
    }
    sum += interaction_eps(disk, f2, cfg, eps, 0, 1, quad);
    sum += interaction_eps(disk, f2, cfg, eps, 1, 0, quad);
    c.expect(std::abs(full - sum) < 1e-6 * std::max(1.0, std::abs(full)),
             fmt::format("decomposition identity {} vs {}", full, sum));
  }
  // Closed-form fast path vs the general series path.
  {
    const Config cfg = Config::from_points(disk, std::vector<Vec2>{{0.3, 0.2}, {-0.25, 0.4}});
    const EnergyReport fast = renormalized_energy(disk, f2, cfg, quad);
    QuadratureSpec general = quad;
    general.cross_check = true;
    const EnergyReport slow = renormalized_energy(disk, f2, cfg, general);
    c.expect(std::abs(fast.total - slow.total) < 1e-6,
             fmt::format("fast path {} vs general {}", fast.total, slow.total));
  }
  return c;
}

Check equivariance() {
  Check c;
  const Domain disk = Domain::unit_disk();
  const auto g1 = BoundaryDatum::preset_g1(disk);
  QuadratureSpec quad;
  const double e1 =
      renormalized_energy(disk, g1, Config::from_points(disk, std::vector<Vec2>{{0.5, 0}}),
                          quad)
          .total;
  const double e2 =
      renormalized_energy(disk, g1, Config::from_points(disk, std::vector<Vec2>{{0, 0.5}}),
                          quad)
          .total;
  c.expect(std::abs(e1 - e2) < 1e-6, fmt::format("rotation invariance {} vs {}", e1, e2));

  const auto f3 = BoundaryDatum::preset_const(disk, 3);
  const std::vector<Vec2> pts{{0.5, 0}, {-0.2, 0.3}, {0.1, -0.4}};
  std::vector<Vec2> perm{pts[2], pts[0], pts[1]};
  const double ea = renormalized_energy(disk, f3, Config::from_points(disk, pts), quad).total;
  const double eb =
      renormalized_energy(disk, f3, Config::from_points(disk, perm), quad).total;
  c.expect(ea == eb || std::abs(ea - eb) < 1e-12, "permutation invariance");
  return c;
}

Check coarsening_invariants() {
  Check c;
  const Domain disk = Domain::unit_disk();
  std::mt19937_64 rng(505);
  std::uniform_int_distribution<int> nn(1, 8);
  std::uniform_real_distribution<double> ue(-3.0, -0.5);
  for (int t = 0; t < 100; ++t) {
    const int n = nn(rng);
    std::vector<Vec2> pts;
    for (int i = 0; i < n; ++i) pts.push_back(random_in_disk(rng, 0.999));
    const double eps = std::pow(10.0, ue(rng));
    const Config cfg = Config::from_points(disk, pts);
    const CoarsenTrace trace = coarsen(cfg, eps, disk);
    c.expect(static_cast<int>(trace.iterations.size()) <= n * n,
             fmt::format("trace length {} for n {}", trace.iterations.size(), n));
    double prev = eps;
    for (const auto& step : trace.iterations) {
      c.expect(step.eta_after >= prev, "eta must not decrease");
      prev = step.eta_after;
    }
    const double bound =
        std::pow(2.0, n * n) * std::max(eps, std::max(trace.initial_sbar, eps));
    c.expect(trace.final_eta <= bound + 1e-12, "final radius exceeds the guaranteed bound");
  }
  return c;
}

Check conjugate_scaling() {
  Check c;
  const Domain disk = Domain::unit_disk();
  const Config cfg = Config::from_points(disk, std::vector<Vec2>{{0.4, 0}, {-0.4, 0}});
  // Spread of values decays linearly in eps.
  auto spread_p = [&](double eps) {
    const HarmonicSolution p = solve_p(disk, cfg, eps, 0);
    double lo = 1e300, hi = -1e300;
    for (int j = 0; j < 512; ++j) {
      const double s = (j + 0.5) * disk.length() / 512;
      const double v = p.evaluate(disk.point_at(s));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return hi - lo;
  };
  const double s1 = spread_p(0.02);
  const double s2 = spread_p(0.01);
  c.expect(s2 < s1 * 0.75, fmt::format("sup spread did not shrink: {} -> {}", s1, s2));
  c.expect(s2 > s1 * 0.3, fmt::format("sup spread shrank too fast: {} -> {}", s1, s2));

  auto energy_p = [&](double eps) {
    const HarmonicSolution p = solve_p(disk, cfg, eps, 0);
    // Dirichlet energy by the boundary reduction over the perforated domain.
    double e = 0.0;
    for (int core = 0; core < 2; ++core) {
      const Vec2 cpos = cfg.points()[core].position;
      double sum = 0.0;
      const int m = 512;
      for (int j = 0; j < m; ++j) {
        const double phi = (j + 0.5) * kTwoPi / m;
        const Vec2 nu{std::cos(phi), std::sin(phi)};
        const Vec2 x = cpos + eps * nu;
        sum += p.evaluate(x) * p.gradient(x).dot(nu);
      }
      e -= 0.5 * sum * kTwoPi * eps / m;
    }
    return e;
  };
  const double e1 = energy_p(0.02);
  const double e2 = energy_p(0.005);
  const double ratio = e2 / e1;
  const double predicted = std::abs(std::log(0.02)) / std::abs(std::log(0.005));
  c.expect(e1 > 0 && e2 > 0, "conjugate energies must be positive");
  c.expect(ratio < 1.0 && ratio > 0.25 * predicted,
           fmt::format("energy scaling ratio {} vs predicted {}", ratio, predicted));
  return c;
}

}  // namespace

std::vector<SuiteResult> run_selftest() {
  std::vector<std::pair<std::string, std::function<Check()>>> suites = {
      {"field-identities", field_identities},
      {"k-integral-bounds", k_integral_bounds},
      {"solver-oracles", solver_oracles},
      {"energy-identities", energy_identities},
      {"equivariance", equivariance},
      {"coarsening-invariants", coarsening_invariants},
      {"conjugate-scaling", conjugate_scaling},
  };
  std::vector<SuiteResult> results;
  for (auto& [name, fn] : suites) {
    const auto t0 = std::chrono::steady_clock::now();
    SuiteResult r;
    r.name = name;
    try {
      const Check c = fn();
      r.pass = c.ok;
      r.detail = c.detail;
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    results.push_back(std::move(r));
  }
  return results;
}

int selftest_main(std::ostream& os) {
  bool all = true;
  for (const auto& r : run_selftest()) {
    os << (r.pass ? "PASS" : "FAIL") << "  " << r.name;
    os << fmt::format("  ({:.1f}s)", r.seconds);
    if (!r.pass) os << "  " << r.detail;
    os << "\n";
    all = all && r.pass;
  }
  return all ? 0 : 1;
}

}  // namespace dislocate
