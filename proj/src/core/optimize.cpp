#include "core/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "core/parallel.hpp"

namespace dislocate {

namespace {

struct ClusterState {
  std::vector<Dislocation> points;
  std::vector<int> cluster;  // cluster id per point
  std::vector<bool> boundary_cluster;
};

// Single-linkage components of the strict 2*eta proximity graph, flagged as
// boundary clusters when any member sits within eta of the boundary.
void recluster(ClusterState& st, const Domain& domain, double eta) {
  const std::size_t n = st.points.size();
  st.cluster.assign(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (st.cluster[i] >= 0) continue;
    st.cluster[i] = next;
    std::vector<std::size_t> stack{i};
    while (!stack.empty()) {
      const std::size_t k = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < n; ++j) {
        if (st.cluster[j] >= 0) continue;
        if (distance(st.points[k].position, st.points[j].position) < 2.0 * eta) {
          st.cluster[j] = next;
          stack.push_back(j);
        }
      }
    }
    ++next;
  }
  st.boundary_cluster.assign(next, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (domain.boundary_distance(st.points[i].position) <= eta ||
        !domain.contains(st.points[i].position)) {
      st.boundary_cluster[st.cluster[i]] = true;
    }
  }
}

int cluster_count(const ClusterState& st) {
  int m = 0;
  for (int c : st.cluster) m = std::max(m, c + 1);
  return m;
}

// Ranking value of point i inside its cluster: half distance to the nearest
// cluster sibling, capped by the boundary distance for interior points;
// singletons get 0 (interior limit) or their boundary distance (boundary
// limit).
double ranking_value(const ClusterState& st, const Domain& domain, std::size_t i) {
  const int c = st.cluster[i];
  double mutual = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < st.points.size(); ++j) {
    if (j == i || st.cluster[j] != c) continue;
    mutual = std::min(mutual, 0.5 * distance(st.points[i].position, st.points[j].position));
  }
  const bool interior = domain.contains(st.points[i].position);
  if (!std::isfinite(mutual)) {
    return st.boundary_cluster[c] ? domain.boundary_distance(st.points[i].position) : 0.0;
  }
  return interior ? std::min(domain.boundary_distance(st.points[i].position), mutual)
                  : mutual;
}

void fold_coincident(std::vector<Dislocation>& pts) {
  std::vector<Dislocation> out;
  for (const auto& p : pts) {
    bool merged = false;
    for (auto& q : out) {
      if (q.position == p.position) {
        q.multiplicity += p.multiplicity;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(p);
  }
  pts = std::move(out);
}

}  // namespace

CoarsenTrace coarsen(const Config& config, double eps, const Domain& domain,
                     const std::optional<std::vector<std::vector<std::size_t>>>&
                         explicit_clusters) {
  if (eps <= 0.0) throw InvalidArgument("coarsen needs eps > 0");
  const int n = config.total();

  ClusterState st;
  st.points = config.points();
  std::vector<int> fixed_cluster;  // per point, when explicit clusters are given
  if (explicit_clusters) {
    fixed_cluster.assign(st.points.size(), -1);
    int id = 0;
    for (const auto& group : *explicit_clusters) {
      for (std::size_t idx : group) {
        if (idx >= st.points.size() || fixed_cluster[idx] >= 0) {
          throw InvalidArgument("explicit clusters must partition the points");
        }
        fixed_cluster[idx] = id;
      }
      ++id;
    }
    for (int c : fixed_cluster) {
      if (c < 0) throw InvalidArgument("explicit clusters must cover all points");
    }
  }

  CoarsenTrace trace;
  double eta = eps;
  const int max_iter = n * n;

  for (int iter = 0;; ++iter) {
    if (explicit_clusters) {
      st.cluster = fixed_cluster;
      const int m = cluster_count(st);
      st.boundary_cluster.assign(m, false);
      for (std::size_t i = 0; i < st.points.size(); ++i) {
        if (domain.boundary_distance(st.points[i].position) <= eta ||
            !domain.contains(st.points[i].position)) {
          st.boundary_cluster[st.cluster[i]] = true;
        }
      }
    } else {
      recluster(st, domain, eta);
    }

    const int m = cluster_count(st);
    std::vector<double> cluster_min(m, std::numeric_limits<double>::infinity());
    std::vector<double> values(st.points.size());
    double sbar = 0.0;
    for (std::size_t i = 0; i < st.points.size(); ++i) {
      values[i] = ranking_value(st, domain, i);
      cluster_min[st.cluster[i]] = std::min(cluster_min[st.cluster[i]], values[i]);
      sbar = std::max(sbar, values[i]);
    }
    if (iter == 0) trace.initial_sbar = sbar;

    bool all_zero = true;
    double shat = std::numeric_limits<double>::infinity();
    for (int c = 0; c < m; ++c) {
      if (cluster_min[c] > 0.0) {
        all_zero = false;
        shat = std::min(shat, cluster_min[c]);
      }
    }
    if (all_zero) break;

    if (iter >= max_iter) {
      throw Error("coarsening failed to terminate within n^2 iterations");
    }

    if (shat > eta) {
      eta = shat;
      trace.iterations.push_back({CoarsenAction::Relabel, shat, eta, st.points});
      continue;
    }

    // Merge every sibling pair at half distance shat (lexicographic order,
    // each point consumed once); project points whose boundary distance
    // realizes shat.
    std::vector<bool> consumed(st.points.size(), false);
    std::vector<Dislocation> next;
    bool any_merge = false;
    auto lex_less = [&](std::size_t a, std::size_t b) {
      const Vec2 pa = st.points[a].position, pb = st.points[b].position;
      return pa.x < pb.x || (pa.x == pb.x && pa.y < pb.y);
    };
    std::vector<std::size_t> order(st.points.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), lex_less);

    for (std::size_t oi = 0; oi < order.size(); ++oi) {
      const std::size_t i = order[oi];
      if (consumed[i]) continue;
      if (cluster_min[st.cluster[i]] != shat) continue;
      for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
        const std::size_t j = order[oj];
        if (consumed[j] || st.cluster[j] != st.cluster[i]) continue;
        if (0.5 * distance(st.points[i].position, st.points[j].position) == shat) {
          const Vec2 mid = 0.5 * (st.points[i].position + st.points[j].position);
          next.push_back({mid, st.points[i].multiplicity + st.points[j].multiplicity});
          consumed[i] = consumed[j] = true;
          any_merge = true;
          break;
        }
      }
    }
    bool any_project = false;
    for (std::size_t i = 0; i < st.points.size(); ++i) {
      if (consumed[i]) continue;
      if (cluster_min[st.cluster[i]] == shat && values[i] == shat &&
          domain.contains(st.points[i].position) &&
          domain.boundary_distance(st.points[i].position) == shat && !any_merge) {
        next.push_back(
            {domain.project_to_boundary(st.points[i].position), st.points[i].multiplicity});
        consumed[i] = true;
        any_project = true;
        continue;
      }
    }
    for (std::size_t i = 0; i < st.points.size(); ++i) {
      if (!consumed[i]) next.push_back(st.points[i]);
    }
    if (!any_merge && !any_project) {
      throw Error("coarsening made no progress");
    }
    fold_coincident(next);
    st.points = std::move(next);
    if (explicit_clusters) {
      // Merged points inherit the cluster of their constituents; with an
      // explicit partition we conservatively collapse to index order.
      fixed_cluster.assign(st.points.size(), 0);
      if (!explicit_clusters->empty() && explicit_clusters->size() > 1) {
        // Recompute by nearest original group representative.
        for (std::size_t i = 0; i < st.points.size(); ++i) {
          double best = std::numeric_limits<double>::infinity();
          int bestc = 0;
          int id = 0;
          for (const auto& group : *explicit_clusters) {
            for (std::size_t idx : group) {
              const double d2 =
                  (config.points()[idx].position - st.points[i].position).norm2();
              if (d2 < best) {
                best = d2;
                bestc = id;
              }
            }
            ++id;
          }
          fixed_cluster[i] = bestc;
        }
      }
    }
    eta = eta + shat;
    trace.iterations.push_back(
        {any_merge ? CoarsenAction::MergeMidpoint : CoarsenAction::ProjectToBoundary, shat,
         eta, st.points});
  }

  trace.final_points = st.points;
  trace.final_eta = eta;
  return trace;
}

double ngon_energy(const Domain& domain, const BoundaryDatum& datum, int n, double radius,
                   const QuadratureSpec& quad) {
  if (n < 1) throw InvalidArgument("ngon needs n >= 1");
  std::vector<Vec2> pts;
  for (int k = 0; k < n; ++k) {
    const double phi = kTwoPi * k / n;
    pts.push_back({radius * std::cos(phi), radius * std::sin(phi)});
  }
  if (n > 1 && radius == 0.0) return std::numeric_limits<double>::infinity();
  const Config config = Config::from_points(domain, pts);
  return renormalized_energy(domain, datum, config, quad).total;
}

std::vector<double> default_radius_grid(int n) {
  std::vector<double> grid;
  if (n == 1) grid.push_back(0.0);
  for (int i = 1; i <= 49; ++i) grid.push_back(0.02 * i);
  return grid;
}

OptimizationResult ngon_sweep(const Domain& domain, const BoundaryDatum& datum, int n,
                              const std::vector<double>& radii, double radius_tol,
                              const QuadratureSpec& quad) {
  if (radii.size() < 2) throw InvalidArgument("radius grid needs at least two entries");
  OptimizationResult res;
  res.history.resize(radii.size());
  parallel_for(radii.size(), [&](std::size_t i) {
    res.history[i] = {radii[i], ngon_energy(domain, datum, n, radii[i], quad)};
  });
  res.evaluations = static_cast<long>(radii.size());

  std::size_t best = 0;
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (res.history[i].energy < res.history[best].energy) best = i;
  }
  double lo = res.history[best == 0 ? 0 : best - 1].radius;
  double hi = res.history[std::min(best + 1, radii.size() - 1)].radius;
  if (lo == hi) hi = std::min(1.0, lo + radius_tol);

  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - gr * (hi - lo);
  double d = lo + gr * (hi - lo);
  double fc = ngon_energy(domain, datum, n, c, quad);
  double fd = ngon_energy(domain, datum, n, d, quad);
  res.evaluations += 2;
  while (hi - lo > radius_tol) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = ngon_energy(domain, datum, n, c, quad);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = ngon_energy(domain, datum, n, d, quad);
    }
    ++res.evaluations;
  }
  double best_r = 0.5 * (lo + hi);
  double best_e = ngon_energy(domain, datum, n, best_r, quad);
  ++res.evaluations;
  // Keep the grid best if refinement did not help (flat or edge cases).
  if (res.history[best].energy < best_e) {
    best_r = res.history[best].radius;
    best_e = res.history[best].energy;
  }
  res.best_energy = best_e;
  res.converged = true;
  std::vector<Vec2> pts;
  for (int k = 0; k < n; ++k) {
    const double phi = kTwoPi * k / n;
    pts.push_back({best_r * std::cos(phi), best_r * std::sin(phi)});
  }
  res.best_config = Config::from_points(domain, pts);
  return res;
}

namespace {

double halton(std::uint64_t index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
                           53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113};

struct NelderMead {
  std::function<double(const std::vector<double>&)> f;
  long evals = 0;

  double eval(const std::vector<double>& x) {
    ++evals;
    return f(x);
  }

  // Standard coefficients: reflection 1, expansion 2, contraction 0.5,
  // shrink 0.5.
  std::pair<std::vector<double>, double> run(std::vector<double> x0, double step,
                                             int max_iter) {
    const std::size_t dim = x0.size();
    std::vector<std::vector<double>> xs(dim + 1, x0);
    std::vector<double> fs(dim + 1);
    for (std::size_t i = 0; i < dim; ++i) xs[i + 1][i] += step;
    for (std::size_t i = 0; i <= dim; ++i) fs[i] = eval(xs[i]);

    for (int it = 0; it < max_iter; ++it) {
      std::vector<std::size_t> idx(dim + 1);
      for (std::size_t i = 0; i <= dim; ++i) idx[i] = i;
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return fs[a] < fs[b];
      });
      const std::size_t best = idx[0], worst = idx[dim], second = idx[dim - 1];
      if (std::isfinite(fs[best]) && std::isfinite(fs[worst]) &&
          fs[worst] - fs[best] < 1e-12 * (1.0 + std::abs(fs[best]))) {
        break;
      }

      std::vector<double> centroid(dim, 0.0);
      for (std::size_t i = 0; i <= dim; ++i) {
        if (i == worst) continue;
        for (std::size_t k = 0; k < dim; ++k) centroid[k] += xs[i][k];
      }
      for (double& c : centroid) c /= static_cast<double>(dim);

      auto blend = [&](double t) {
        std::vector<double> x(dim);
        for (std::size_t k = 0; k < dim; ++k) {
          x[k] = centroid[k] + t * (centroid[k] - xs[worst][k]);
        }
        return x;
      };
      const std::vector<double> xr = blend(1.0);
      const double fr = eval(xr);
      if (fr < fs[best]) {
        const std::vector<double> xe = blend(2.0);
        const double fe = eval(xe);
        if (fe < fr) {
          xs[worst] = xe;
          fs[worst] = fe;
        } else {
          xs[worst] = xr;
          fs[worst] = fr;
        }
      } else if (fr < fs[second]) {
        xs[worst] = xr;
        fs[worst] = fr;
      } else {
        const std::vector<double> xc = blend(fr < fs[worst] ? 0.5 : -0.5);
        const double fcv = eval(xc);
        if (fcv < std::min(fr, fs[worst])) {
          xs[worst] = xc;
          fs[worst] = fcv;
        } else {
          for (std::size_t i = 0; i <= dim; ++i) {
            if (i == best) continue;
            for (std::size_t k = 0; k < dim; ++k) {
              xs[i][k] = 0.5 * (xs[i][k] + xs[best][k]);
            }
            fs[i] = eval(xs[i]);
          }
        }
      }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= dim; ++i) {
      if (fs[i] < fs[best]) best = i;
    }
    return {xs[best], fs[best]};
  }
};

}  // namespace

OptimizationResult minimize(const Domain& domain, const BoundaryDatum& datum, int n,
                            int starts, std::uint64_t seed, const QuadratureSpec& quad) {
  if (n < 1) throw InvalidArgument("minimize needs n >= 1");
  if (starts < 1) throw InvalidArgument("minimize needs at least one start");
  if (2 * n > static_cast<int>(std::size(kPrimes))) {
    throw InvalidArgument("too many dislocations for the start sampler");
  }

  const double margin = 0.1;
  const double floor_d = 1e-4;
  auto objective = [&](const std::vector<double>& x) {
    std::vector<Vec2> pts(n);
    for (int i = 0; i < n; ++i) pts[i] = {x[2 * i], x[2 * i + 1]};
    for (const Vec2& p : pts) {
      if (!domain.contains(p)) return std::numeric_limits<double>::infinity();
    }
    const Config cfg = Config::from_points(domain, pts);
    if (static_cast<int>(cfg.distinct()) != n || cfg.min_radius() < floor_d) {
      return std::numeric_limits<double>::infinity();
    }
    return renormalized_energy(domain, datum, cfg, quad).total;
  };

  // Cranley-Patterson rotation of a Halton stream, seeded.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> shift(2 * n);
  for (double& s : shift) s = unif(rng);

  // Bounding box of the domain.
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& smp : domain.samples()) {
    xmin = std::min(xmin, smp.point.x);
    xmax = std::max(xmax, smp.point.x);
    ymin = std::min(ymin, smp.point.y);
    ymax = std::max(ymax, smp.point.y);
  }

  std::vector<std::vector<double>> start_points(starts);
  std::uint64_t h = 1;
  for (int s = 0; s < starts; ++s) {
    std::vector<double> x(2 * n);
    for (int i = 0; i < n; ++i) {
      for (int attempt = 0; attempt < 10000; ++attempt, ++h) {
        const double ux = std::fmod(halton(h, kPrimes[2 * i]) + shift[2 * i], 1.0);
        const double uy = std::fmod(halton(h, kPrimes[2 * i + 1]) + shift[2 * i + 1], 1.0);
        const Vec2 p{xmin + ux * (xmax - xmin), ymin + uy * (ymax - ymin)};
        if (domain.contains(p) && domain.boundary_distance(p) > margin) {
          x[2 * i] = p.x;
          x[2 * i + 1] = p.y;
          break;
        }
      }
    }
    start_points[s] = std::move(x);
  }

  struct StartResult {
    std::vector<double> x;
    double f = std::numeric_limits<double>::infinity();
    long evals = 0;
  };
  std::vector<StartResult> results(starts);
  parallel_for(starts, [&](std::size_t s) {
    NelderMead nm;
    nm.f = objective;
    auto [x, fv] = nm.run(start_points[s], 0.1 * domain.diameter() * 0.5, 400 * n);
    results[s] = {std::move(x), fv, nm.evals};
  });

  OptimizationResult res;
  res.best_energy = std::numeric_limits<double>::infinity();
  std::vector<double> best_x;
  for (int s = 0; s < starts; ++s) {
    res.evaluations += results[s].evals;
    res.history.push_back({static_cast<double>(s), results[s].f});
    if (results[s].f < res.best_energy) {
      res.best_energy = results[s].f;
      best_x = results[s].x;
    }
  }
  res.converged = std::isfinite(res.best_energy);
  if (!res.converged) {
    // Every start diverged; report the first start point as a placeholder.
    best_x = start_points[0];
  }
  std::vector<Vec2> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = {best_x[2 * i], best_x[2 * i + 1]};
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  res.best_config = Config::from_points(domain, pts);
  return res;
}

AsymptoticsStudy asymptotics_study(const Domain& domain, int n_min, int n_max, int fit_min,
                                   int fit_max, const QuadratureSpec& quad) {
  if (n_min < 1 || n_max < n_min) throw InvalidArgument("bad n range");
  AsymptoticsStudy study;
  study.fit_min = fit_min > 0 ? fit_min : n_min + (n_max - n_min) / 2;
  study.fit_max = fit_max > 0 ? fit_max : n_max;

  study.rows.resize(n_max - n_min + 1);
  parallel_for(study.rows.size(), [&](std::size_t idx) {
    const int n = n_min + static_cast<int>(idx);
    const BoundaryDatum datum = BoundaryDatum::preset_const(domain, n);
    OptimizationResult sweep =
        ngon_sweep(domain, datum, n, default_radius_grid(n), 1e-4, quad);
    AsymptoticsRow row;
    row.n = n;
    row.radius = sweep.best_config.points()[0].position.norm();
    row.energy = sweep.best_energy;
    row.dist_to_boundary =
        domain.boundary_distance(sweep.best_config.points()[0].position);
    row.evaluations = sweep.evaluations;
    study.rows[idx] = row;
  });

  auto fit_slope = [&](auto value_of) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& row : study.rows) {
      if (row.n < study.fit_min || row.n > study.fit_max) continue;
      const double v = value_of(row);
      if (!(v > 0.0)) continue;
      const double lx = std::log(static_cast<double>(row.n));
      const double ly = std::log(v);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++m;
    }
    if (m < 2) return 0.0;
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
  };
  study.dist_slope = fit_slope([](const AsymptoticsRow& r) { return r.dist_to_boundary; });
  study.energy_slope = fit_slope([](const AsymptoticsRow& r) { return std::abs(r.energy); });
  return study;
}

}  // namespace dislocate
