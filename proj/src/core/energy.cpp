#include "core/energy.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "core/fields.hpp"
#include "core/quad.hpp"

namespace dislocate {

namespace {

using cplx = std::complex<double>;

cplx as_complex(Vec2 v) { return {v.x, v.y}; }

// Integral over the outer boundary, split at the datum kinks.
double boundary_integral(const Domain& domain, const std::function<double(double)>& fn,
                         const std::vector<double>& kinks, const QuadratureSpec& quad) {
  return adaptive_1d_pieces(fn, 0.0, domain.length(), kinks, 0.1 * quad.rel_tol,
                            quad.max_depth + 4);
}

// Integral over the circle of radius r about c, ds = r dphi; trapezoid is
// spectrally accurate for these smooth periodic integrands.
double circle_integral(Vec2 c, double r, const std::function<double(Vec2, Vec2)>& fn,
                       int nodes = 512) {
  double sum = 0.0;
  for (int j = 0; j < nodes; ++j) {
    const double phi = (j + 0.5) * kTwoPi / nodes;
    const Vec2 nu{std::cos(phi), std::sin(phi)};
    sum += fn(c + r * nu, nu);
  }
  return sum * kTwoPi * r / nodes;
}

int auto_modes(const Domain& domain, const Config& config) {
  double rho = 0.0;
  for (const auto& p : config.points()) {
    rho = std::max(rho, p.position.norm() / domain.disk_radius());
  }
  int k = 256;
  while (k < 4096 && std::pow(rho, k) > 1e-15) k *= 2;
  return k;
}

// int_Omega K_a . K_b dx on the disk of radius R centered at the origin.
double pair_term_disk(double R, Vec2 a, Vec2 b) {
  const cplx za = as_complex(a) / R;
  const cplx zb = as_complex(b) / R;
  return kPi * std::log(std::abs(1.0 - std::conj(za) * zb)) -
         kTwoPi * std::log(distance(a, b) / R);
}

// int_Omega K_a . K_b dx via the boundary: closed form exists only on the
// disk; elsewhere reduce with Green's identity.
double pair_term(const Domain& domain, Vec2 a, Vec2 b, const QuadratureSpec& quad) {
  if (domain.is_disk()) return pair_term_disk(domain.disk_radius(), a, b);
  auto fn = [&](double s) {
    const Vec2 x = domain.point_at(s);
    const Vec2 nu = domain.normal_at(s);
    const Vec2 rb = x - b;
    return std::log((x - a).norm()) * nu.dot(rb) / rb.norm2();
  };
  return boundary_integral(domain, fn, {}, quad) - kTwoPi * std::log(distance(a, b));
}

// K_a . nu on the boundary point x with outward normal nu.
double k_dot_nu(Vec2 a, Vec2 x, Vec2 nu) {
  const Vec2 r = x - a;
  return Vec2{-r.y, r.x}.dot(nu) / r.norm2();
}

struct LimitTerms {
  double regular = 0.0;
  double k_self = 0.0;
  double cross = 0.0;
  double pair = 0.0;
  double residual = 0.0;
  double cross_check_gap = 0.0;
};

// Closed-form ingredients for the rotation-invariant datum on the disk:
// the composite boundary value has the exact series
//   D(phi) = const - sum_m (1/m) [A_m sin(m phi) - B_m cos(m phi)],
// with A_m + i B_m = sum_j m_j (a_j / R)^m.
LimitTerms limit_terms_disk_const(const Domain& domain, const Config& config) {
  const double R = domain.disk_radius();
  const auto& pts = config.points();
  LimitTerms t;

  std::vector<cplx> z;
  for (const auto& p : pts) z.push_back(as_complex(p.position) / R);

  // regular = -(pi/2) sum_{j,k} m_j m_k log|1 - z_j conj(z_k)|
  for (std::size_t j = 0; j < z.size(); ++j) {
    for (std::size_t k = 0; k < z.size(); ++k) {
      const double w = pts[j].multiplicity * pts[k].multiplicity;
      t.regular += -0.5 * kPi * w * std::log(std::abs(1.0 - z[j] * std::conj(z[k])));
    }
  }
  // cross_i = -pi sum_j m_j log|1 - z_i conj(z_j)|, weighted by m_i
  for (std::size_t i = 0; i < z.size(); ++i) {
    double ci = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      ci += -kPi * pts[j].multiplicity * std::log(std::abs(1.0 - z[i] * std::conj(z[j])));
    }
    t.cross += pts[i].multiplicity * ci;
  }
  // k_self_i = (pi/2) log(1 - |z_i|^2) - pi log(d_i / ...): radial exit
  // integral over the disk: int log(Rexit) dtheta = pi log(R^2 - |a|^2) + ...
  const auto& d = config.radii();
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double rho2 = std::norm(z[i]);
    // int_0^{2pi} log Rexit = pi log(R^2 (1 - rho^2)) = 2 pi log R + pi log(1-rho^2)
    const double int_log_exit = kTwoPi * std::log(R) + kPi * std::log1p(-rho2);
    t.k_self += 0.5 * pts[i].multiplicity * pts[i].multiplicity *
                (int_log_exit - kTwoPi * std::log(d[i]));
  }
  t.residual = 0.0;
  return t;
}

LimitTerms limit_terms_general(const Domain& domain, const BoundaryDatum& datum,
                               const Config& config, const QuadratureSpec& quad,
                               HarmonicSolution* out_solution) {
  const auto& pts = config.points();
  const auto& d = config.radii();
  LimitTerms t;

  const CompositeDatum comp = composite_dirichlet(domain, datum, config);
  SolverOpts opts;
  if (domain.is_disk()) opts.fourier_modes = auto_modes(domain, config);
  HarmonicSolution v = solve_dirichlet(domain, {comp.value, comp.kinks}, opts);
  t.residual = v.boundary_residual();

  // regular: exact series formula on the disk, boundary reduction otherwise.
  if (v.is_fourier()) {
    t.regular = v.series_energy(domain.disk_radius());
  } else {
    auto fn = [&](double s) {
      const Vec2 x = domain.point_at(s);
      return comp.value(s) * v.gradient(x).dot(domain.normal_at(s));
    };
    t.regular = 0.5 * boundary_integral(domain, fn, comp.kinks, quad);
  }

  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2 a = pts[i].position;
    t.k_self += 0.5 * k_energy_in_domain(domain, a, d[i], {}, quad);
    // cross_i over Omega_{d_i}(a_i) reduces to the outer boundary because
    // K_i has no flux and no tangential circulation contribution on its own
    // circles.
    auto fn = [&](double s) {
      return comp.value(s) * k_dot_nu(a, domain.point_at(s), domain.normal_at(s));
    };
    t.cross += boundary_integral(domain, fn, comp.kinks, quad);
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      t.pair += pair_term(domain, a, pts[j].position, quad);
    }
  }

  if (quad.cross_check) {
    // 2D quadrature route for the cross terms: polar slices about each a_i.
    double worst = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Vec2 a = pts[i].position;
      auto angular = [&](double th) {
        const Vec2 dir{std::cos(th), std::sin(th)};
        double sum = 0.0;
        for (const auto& [lo, hi] : ray_intervals(domain, a, dir, d[i], {})) {
          sum += adaptive_1d(
              [&](double r) {
                const Vec2 x = a + r * dir;
                return v.gradient(x).dot(k_field(a, x)) * r;
              },
              lo, hi, 0.3 * quad.rel_tol, quad.max_depth);
        }
        return sum;
      };
      const double two_d = adaptive_1d(angular, 0.0, kTwoPi, quad.rel_tol, quad.max_depth);
      auto fn = [&](double s) {
        return comp.value(s) * k_dot_nu(a, domain.point_at(s), domain.normal_at(s));
      };
      const double reduced = boundary_integral(domain, fn, comp.kinks, quad);
      worst = std::max(worst, std::abs(two_d - reduced) / std::max(1.0, std::abs(reduced)));
    }
    // Pair terms against the desingularized 2D integral.
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        const double two_d =
            k_dot_integral(pts[i].position, pts[j].position, Region{&domain}, quad);
        const double reduced = pair_term(domain, pts[i].position, pts[j].position, quad);
        worst = std::max(worst, std::abs(two_d - reduced) / std::max(1.0, std::abs(reduced)));
      }
    }
    t.cross_check_gap = worst;
  }

  if (out_solution != nullptr) *out_solution = v;
  return t;
}

EnergyReport infinite_report(const Config& config, EnergyMode mode, double eps) {
  EnergyReport r;
  r.mode = mode;
  r.epsilon = eps;
  r.n = config.total();
  r.infinite = true;
  r.total = std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace

std::string EnergyReport::csv_header() {
  return "mode,epsilon,n,total,log_term,regular_energy,k_self,cross,pair,error_estimate";
}

std::string EnergyReport::csv_row() const {
  return fmt::format("{},{},{},{},{},{},{},{},{},{}",
                     mode == EnergyMode::Limit ? "limit" : "core_radius", epsilon, n, total,
                     log_term, regular_energy, k_self, cross, pair, error_estimate);
}

EnergyReport renormalized_energy(const Domain& domain, const BoundaryDatum& datum,
                                 const Config& config, const QuadratureSpec& quad) {
  if (!config.all_simple_interior(domain)) {
    return infinite_report(config, EnergyMode::Limit, 0.0);
  }
  if (datum.total() != config.total()) {
    throw InvalidArgument("datum circulation does not match the configuration");
  }

  EnergyReport r;
  r.mode = EnergyMode::Limit;
  r.n = config.total();
  const auto& d = config.radii();
  for (double di : d) r.log_term += kPi * std::log(di);

  LimitTerms t;
  if (domain.is_disk() && datum.rotation_invariant() && !quad.cross_check) {
    t = limit_terms_disk_const(domain, config);
    // Pair terms are closed-form on the disk.
    const auto& pts = config.points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        t.pair += pts[i].multiplicity * pts[j].multiplicity *
                  pair_term_disk(domain.disk_radius(), pts[i].position, pts[j].position);
      }
    }
  } else {
    t = limit_terms_general(domain, datum, config, quad, nullptr);
  }

  r.regular_energy = t.regular;
  r.k_self = t.k_self;
  r.cross = t.cross;
  r.pair = t.pair;
  r.total = r.log_term + r.regular_energy + r.k_self + r.cross + r.pair;
  const double scale = std::abs(r.log_term) + std::abs(r.regular_energy) +
                       std::abs(r.k_self) + std::abs(r.cross) + std::abs(r.pair);
  r.error_estimate = quad.rel_tol * scale + t.residual + t.cross_check_gap * scale;
  return r;
}

double self_energy(const Domain& domain, const BoundaryDatum& datum, const Config& config,
                   std::size_t i, const QuadratureSpec& quad) {
  const auto& pts = config.points();
  if (i >= pts.size()) throw InvalidArgument("index out of range");
  if (!config.all_simple_interior(domain)) {
    throw InvalidArgument("self energy needs simple interior dislocations");
  }
  const Vec2 a = pts[i].position;
  const double dist_bd = domain.boundary_distance(a);
  const int n = config.total();

  // Neumann corrector: flux f/n minus the normal derivative of log|x-a|.
  auto flux = [&](double s) {
    const Vec2 x = domain.point_at(s);
    const Vec2 nu = domain.normal_at(s);
    const Vec2 r = x - a;
    return datum.f(s) / n - nu.dot(r) / r.norm2();
  };
  SolverOpts opts;
  if (domain.is_disk()) opts.fourier_modes = auto_modes(domain, config);
  HarmonicSolution w = solve_neumann(domain, {flux, datum.kink_params()}, opts);

  double e = kPi * std::log(dist_bd);
  // 1/2 int_{Omega_d} |grad phi|^2
  e += 0.5 * k_energy_in_domain(domain, a, dist_bd, {}, quad);
  // int_{Omega_d} grad phi . grad w = boundary term - core circle term
  auto outer = [&](double s) {
    const Vec2 x = domain.point_at(s);
    const Vec2 nu = domain.normal_at(s);
    const Vec2 r = x - a;
    return w.evaluate(x) * nu.dot(r) / r.norm2();
  };
  e += boundary_integral(domain, outer, datum.kink_params(), quad);
  e -= circle_integral(a, dist_bd,
                       [&](Vec2 x, Vec2) { return w.evaluate(x) / dist_bd; });
  // 1/2 int_{Omega_d} |grad w|^2 + 1/2 int_{B_d} |grad w|^2 = 1/2 int_Omega
  if (w.is_fourier()) {
    e += w.series_energy(domain.disk_radius());
  } else {
    auto wdnw = [&](double s) {
      const Vec2 x = domain.point_at(s);
      return w.evaluate(x) * w.gradient(x).dot(domain.normal_at(s));
    };
    e += 0.5 * boundary_integral(domain, wdnw, datum.kink_params(), quad);
  }
  return e;
}

double interaction_energy(const Domain& domain, const BoundaryDatum& datum,
                          const Config& config, std::size_t i, std::size_t j,
                          const QuadratureSpec& quad) {
  const auto& pts = config.points();
  if (i >= pts.size() || j >= pts.size() || i == j) {
    throw InvalidArgument("interaction needs two distinct indices");
  }
  if (!config.all_simple_interior(domain)) {
    throw InvalidArgument("interaction energy needs simple interior dislocations");
  }
  const int n = config.total();
  const Vec2 a = pts[i].position;
  const Vec2 b = pts[j].position;

  auto corrector = [&](Vec2 center) {
    auto flux = [&, center](double s) {
      const Vec2 x = domain.point_at(s);
      const Vec2 nu = domain.normal_at(s);
      const Vec2 r = x - center;
      return datum.f(s) / n - nu.dot(r) / r.norm2();
    };
    SolverOpts opts;
    if (domain.is_disk()) opts.fourier_modes = auto_modes(domain, config);
    return solve_neumann(domain, {flux, datum.kink_params()}, opts);
  };
  const HarmonicSolution wi = corrector(a);
  const HarmonicSolution wj = corrector(b);

  double e = pair_term(domain, a, b, quad);
  // int grad phi_i . grad w_j = boundary - 2 pi w_j(a_i), and symmetrically.
  auto mixed = [&](const HarmonicSolution& w, Vec2 center) {
    auto fn = [&](double s) {
      const Vec2 x = domain.point_at(s);
      const Vec2 nu = domain.normal_at(s);
      const Vec2 r = x - center;
      return w.evaluate(x) * nu.dot(r) / r.norm2();
    };
    return boundary_integral(domain, fn, datum.kink_params(), quad) -
           kTwoPi * w.evaluate(center);
  };
  e += mixed(wj, a);
  e += mixed(wi, b);
  // int grad w_i . grad w_j over the whole domain.
  auto wwdn = [&](double s) {
    const Vec2 x = domain.point_at(s);
    return wi.evaluate(x) * wj.gradient(x).dot(domain.normal_at(s));
  };
  e += boundary_integral(domain, wwdn, datum.kink_params(), quad);
  return e;
}

namespace {

// Shared machinery for the finite-eps energies. Solves the per-dislocation
// pieces once; everything else reads their traces on circles and the outer
// boundary.
struct CoreContext {
  const Domain* domain;
  const BoundaryDatum* datum;
  const Config* config;
  double eps;
  QuadratureSpec quad;
  std::vector<HarmonicSolution> vbar;  // one per distinct dislocation
  std::vector<CompositeDatum> vbar_datum;
  CompositeDatum full_datum;
  std::vector<Disk> cores;

  const Dislocation& pt(std::size_t i) const { return config->points()[i]; }
  double weight(std::size_t i) const {
    return pt(i).multiplicity * (domain->contains(pt(i).position) ? 1.0 : 2.0);
  }

  double vbar_sum(Vec2 x) const {
    double v = 0.0;
    for (std::size_t i = 0; i < vbar.size(); ++i) {
      v += pt(i).multiplicity * vbar[i].evaluate(x);
    }
    return v;
  }
  Vec2 vbar_sum_gradient(Vec2 x) const {
    Vec2 g{0, 0};
    for (std::size_t i = 0; i < vbar.size(); ++i) {
      g += static_cast<double>(pt(i).multiplicity) * vbar[i].gradient(x);
    }
    return g;
  }
};

CoreContext make_core_context(const Domain& domain, const BoundaryDatum& datum,
                              const Config& config, double eps, const QuadratureSpec& quad,
                              bool relax_guard) {
  if (eps <= 0.0) throw InvalidArgument("core radius must be positive");
  if (!relax_guard && eps >= 0.5 * config.min_radius()) {
    throw InvalidArgument(
        "core radius too large for this configuration (eps must stay below half "
        "the smallest separation radius; pass the relax flag to override)");
  }
  CoreContext ctx{&domain, &datum, &config, eps, quad, {}, {}, {}, {}};
  const auto& pts = config.points();
  for (const auto& p : pts) ctx.cores.push_back({p.position, eps});

  ctx.full_datum = composite_dirichlet(domain, datum, config);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    ctx.vbar_datum.push_back(composite_dirichlet(domain, datum, config, static_cast<int>(i)));
    std::vector<std::function<double(double)>> flux;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const Vec2 a = pts[i].position;
      const Vec2 ck = pts[k].position;
      flux.push_back([a, ck, eps](double phi) {
        const Vec2 nu{std::cos(phi), std::sin(phi)};
        const Vec2 x = ck + eps * nu;
        // Domain-outward normal on a core circle is -nu.
        return -k_dot_nu(a, x, -nu);
      });
    }
    SolverOpts opts;
    ctx.vbar.push_back(solve_mixed_perforated(domain, config, eps,
                                              {ctx.vbar_datum[i].value, ctx.vbar_datum[i].kinks},
                                              flux, opts));
  }
  return ctx;
}

// int_{Omega_eps(a)} K_i . K_j over the perforated domain via Green (both
// logs are harmonic there).
double pair_perforated(const CoreContext& ctx, std::size_t i, std::size_t j) {
  const Domain& domain = *ctx.domain;
  const Vec2 a = ctx.pt(i).position;
  const Vec2 b = ctx.pt(j).position;
  auto outer = [&](double s) {
    const Vec2 x = domain.point_at(s);
    const Vec2 nu = domain.normal_at(s);
    const Vec2 rb = x - b;
    return std::log((x - a).norm()) * nu.dot(rb) / rb.norm2();
  };
  double v = boundary_integral(domain, outer, {}, ctx.quad);
  for (const Disk& core : ctx.cores) {
    v -= circle_integral(core.center, core.radius, [&](Vec2 x, Vec2 nu) {
      const Vec2 rb = x - b;
      return std::log((x - a).norm()) * nu.dot(rb) / rb.norm2();
    });
  }
  return v;
}

// int_{Omega_eps(bold a)} K_i . grad u where u is one of the vbar pieces with
// known core fluxes: reduces to boundary terms of u against K_i.
double cross_piece(const CoreContext& ctx, std::size_t i, const HarmonicSolution& u,
                   const std::function<double(double)>& u_outer) {
  const Domain& domain = *ctx.domain;
  const Vec2 a = ctx.pt(i).position;
  auto outer = [&](double s) {
    return u_outer(s) * k_dot_nu(a, domain.point_at(s), domain.normal_at(s));
  };
  double v = boundary_integral(domain, outer, ctx.full_datum.kinks, ctx.quad);
  for (std::size_t k = 0; k < ctx.cores.size(); ++k) {
    if (ctx.cores[k].center == a) continue;  // K_i . nu vanishes on its own circle
    const Disk& core = ctx.cores[k];
    v -= circle_integral(core.center, core.radius, [&](Vec2 x, Vec2 nu) {
      return u.evaluate(x) * k_dot_nu(a, x, nu);
    });
  }
  return v;
}

}  // namespace

EnergyReport core_energy(const Domain& domain, const BoundaryDatum& datum,
                         const Config& config, double eps, const QuadratureSpec& quad,
                         bool relax_guard) {
  if (datum.total() != config.total()) {
    throw InvalidArgument("datum circulation does not match the configuration");
  }
  CoreContext ctx = make_core_context(domain, datum, config, eps, quad, relax_guard);
  const auto& pts = config.points();

  EnergyReport r;
  r.mode = EnergyMode::CoreRadius;
  r.epsilon = eps;
  r.n = config.total();
  r.log_term = -kPi * r.n * std::abs(std::log(eps));

  double residual = 0.0;
  for (const auto& s : ctx.vbar) residual += s.boundary_residual();

  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double wi = ctx.weight(i);
    std::vector<Disk> others;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (k != i) others.push_back(ctx.cores[k]);
    }
    r.k_self += 0.5 * wi * wi *
                k_energy_in_domain(domain, pts[i].position, eps, others, quad);
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      r.pair += ctx.weight(i) * ctx.weight(j) * pair_perforated(ctx, i, j);
    }
  }

  // cross = sum_i w_i int K_i . grad(vbar): use the exact outer trace of the
  // combined datum and the evaluated circle traces.
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2 a = pts[i].position;
    auto outer = [&](double s) {
      return ctx.full_datum.value(s) *
             k_dot_nu(a, domain.point_at(s), domain.normal_at(s));
    };
    double ci = boundary_integral(domain, outer, ctx.full_datum.kinks, quad);
    for (std::size_t k = 0; k < ctx.cores.size(); ++k) {
      if (k == i) continue;
      const Disk& core = ctx.cores[k];
      ci -= circle_integral(core.center, core.radius, [&](Vec2 x, Vec2 nu) {
        return ctx.vbar_sum(x) * k_dot_nu(a, x, nu);
      });
    }
    r.cross += ctx.weight(i) * ci;
  }

  // regular = 1/2 int |grad vbar|^2 over the perforated domain.
  {
    auto outer = [&](double s) {
      const Vec2 x = domain.point_at(s);
      return ctx.full_datum.value(s) * ctx.vbar_sum_gradient(x).dot(domain.normal_at(s));
    };
    double reg = boundary_integral(domain, outer, ctx.full_datum.kinks, quad);
    for (std::size_t k = 0; k < ctx.cores.size(); ++k) {
      const Disk& core = ctx.cores[k];
      reg -= circle_integral(core.center, core.radius, [&](Vec2 x, Vec2 nu) {
        // Exact Neumann trace: grad(vbar) . nu_ball = -sum_j w_j K_j . nu_ball.
        double dn = 0.0;
        for (std::size_t j = 0; j < pts.size(); ++j) {
          dn -= ctx.weight(j) * k_dot_nu(pts[j].position, x, nu);
        }
        return ctx.vbar_sum(x) * dn;
      });
    }
    r.regular_energy = 0.5 * reg;
  }

  r.total = r.log_term + r.regular_energy + r.k_self + r.cross + r.pair;
  const double scale = std::abs(r.log_term) + std::abs(r.regular_energy) +
                       std::abs(r.k_self) + std::abs(r.cross) + std::abs(r.pair);
  r.error_estimate = quad.rel_tol * scale + residual;
  return r;
}

double single_core_renormalized(const Domain& domain, const BoundaryDatum& datum,
                                const Config& config, double eps, std::size_t i,
                                const QuadratureSpec& quad) {
  const auto& pts = config.points();
  if (i >= pts.size()) throw InvalidArgument("index out of range");
  const Vec2 a = pts[i].position;
  const CompositeDatum di = composite_dirichlet(domain, datum, config, static_cast<int>(i));
  const Config single = Config::from_weighted(domain, std::vector<Dislocation>{{a, 1}});
  std::vector<std::function<double(double)>> flux{[](double) { return 0.0; }};
  HarmonicSolution u =
      solve_mixed_perforated(domain, single, eps, {di.value, di.kinks}, flux);

  double e = 0.5 * k_energy_in_domain(domain, a, eps, {}, quad);
  auto cross_fn = [&](double s) {
    return di.value(s) * k_dot_nu(a, domain.point_at(s), domain.normal_at(s));
  };
  e += boundary_integral(domain, cross_fn, di.kinks, quad);
  auto reg_fn = [&](double s) {
    const Vec2 x = domain.point_at(s);
    return di.value(s) * u.gradient(x).dot(domain.normal_at(s));
  };
  // Core circle terms vanish: K_a . nu = 0 and the flux datum is zero there.
  e += 0.5 * boundary_integral(domain, reg_fn, di.kinks, quad);
  return e - kPi * std::abs(std::log(eps));
}

double remainder_eps(const Domain& domain, const BoundaryDatum& datum, const Config& config,
                     double eps, std::size_t i, const QuadratureSpec& quad) {
  CoreContext ctx = make_core_context(domain, datum, config, eps, quad, false);
  const auto& pts = config.points();
  if (i >= pts.size()) throw InvalidArgument("index out of range");
  const Vec2 a = pts[i].position;

  // First half: 1/2 int_{Omega_eps(bold a)} |K_i + grad vbar_i|^2.
  std::vector<Disk> others;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k != i) others.push_back(ctx.cores[k]);
  }
  double first = 0.5 * k_energy_in_domain(domain, a, eps, others, quad);
  first += cross_piece(ctx, i, ctx.vbar[i],
                       [&](double s) { return ctx.vbar_datum[i].value(s); });
  {
    auto outer = [&](double s) {
      const Vec2 x = domain.point_at(s);
      return ctx.vbar_datum[i].value(s) * ctx.vbar[i].gradient(x).dot(domain.normal_at(s));
    };
    double reg = boundary_integral(domain, outer, ctx.vbar_datum[i].kinks, quad);
    for (std::size_t k = 0; k < ctx.cores.size(); ++k) {
      const Disk& core = ctx.cores[k];
      reg -= circle_integral(core.center, core.radius, [&](Vec2 x, Vec2 nu) {
        return ctx.vbar[i].evaluate(x) * (-k_dot_nu(a, x, nu));
      });
    }
    first += 0.5 * reg;
  }

  // Second half: the single-core energy with the same datum.
  const double single =
      single_core_renormalized(domain, datum, config, eps, i, quad) +
      kPi * std::abs(std::log(eps));
  return first - single;
}

double interaction_eps(const Domain& domain, const BoundaryDatum& datum,
                       const Config& config, double eps, std::size_t i, std::size_t j,
                       const QuadratureSpec& quad) {
  if (i == j) throw InvalidArgument("interaction needs distinct indices");
  CoreContext ctx = make_core_context(domain, datum, config, eps, quad, false);
  const auto& pts = config.points();
  const Vec2 b = pts[j].position;

  double e = pair_perforated(ctx, i, j);
  e += cross_piece(ctx, i, ctx.vbar[j], [&](double s) { return ctx.vbar_datum[j].value(s); });
  e += cross_piece(ctx, j, ctx.vbar[i], [&](double s) { return ctx.vbar_datum[i].value(s); });
  // int grad vbar_i . grad vbar_j over the perforated domain.
  auto outer = [&](double s) {
    const Vec2 x = domain.point_at(s);
    return ctx.vbar_datum[i].value(s) * ctx.vbar[j].gradient(x).dot(domain.normal_at(s));
  };
  double mixed = boundary_integral(domain, outer, ctx.vbar_datum[i].kinks, quad);
  for (std::size_t k = 0; k < ctx.cores.size(); ++k) {
    const Disk& core = ctx.cores[k];
    mixed -= circle_integral(core.center, core.radius, [&](Vec2 x, Vec2 nu) {
      return ctx.vbar[i].evaluate(x) * (-k_dot_nu(b, x, nu));
    });
  }
  e += mixed;
  return e;
}

CutInvarianceReport cut_invariance_check(const Domain& domain, const BoundaryDatum& datum_a,
                                         const BoundaryDatum& datum_b, const Config& config,
                                         double eps, const QuadratureSpec& quad) {
  CutInvarianceReport rep;
  if (eps > 0.0) {
    rep.energy_a = core_energy(domain, datum_a, config, eps, quad).total;
    rep.energy_b = core_energy(domain, datum_b, config, eps, quad).total;
  } else {
    rep.energy_a = renormalized_energy(domain, datum_a, config, quad).total;
    rep.energy_b = renormalized_energy(domain, datum_b, config, quad).total;
  }
  rep.discrepancy = std::abs(rep.energy_a - rep.energy_b);
  return rep;
}

}  // namespace dislocate
