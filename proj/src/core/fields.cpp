#include "core/fields.hpp"

#include <algorithm>
#include <cmath>

#include "core/quad.hpp"

namespace dislocate {

Vec2 k_field(Vec2 a, Vec2 x) {
  const Vec2 r = x - a;
  const double r2 = r.norm2();
  if (r2 == 0.0) throw InvalidArgument("k_field evaluated at its singular point");
  return Vec2{-r.y, r.x} / r2;
}

BranchCut BranchCut::through(Vec2 anchor, Vec2 boundary_point) {
  const Vec2 d = boundary_point - anchor;
  if (d.norm2() == 0.0) throw InvalidArgument("degenerate branch cut");
  return BranchCut{anchor, d.normalized()};
}

double theta_branch_onesided(const BranchCut& cut, Vec2 x) {
  const Vec2 r = x - cut.anchor;
  if (r.norm2() == 0.0) throw InvalidArgument("theta evaluated at its singular point");
  const double phi_cut = cut.direction.angle();
  double delta = std::fmod(r.angle() - phi_cut, kTwoPi);
  if (delta <= 0.0) delta += kTwoPi;
  return phi_cut + delta;
}

double theta_branch(const BranchCut& cut, Vec2 x) {
  const Vec2 r = x - cut.anchor;
  if (r.norm2() != 0.0 && cut.direction.cross(r) == 0.0 && cut.direction.dot(r) > 0.0) {
    throw InvalidArgument("theta evaluated on its branch cut");
  }
  return theta_branch_onesided(cut, x);
}

double annulus_k_energy(double eps, double R) {
  if (!(eps > 0.0 && eps < R)) throw InvalidArgument("annulus needs 0 < eps < R");
  return kTwoPi * std::log(R / eps);
}

namespace {

void subtract_chord(std::vector<std::pair<double, double>>& intervals, double lo,
                    double hi) {
  std::vector<std::pair<double, double>> out;
  for (const auto& [a, b] : intervals) {
    if (hi <= a || lo >= b) {
      out.emplace_back(a, b);
      continue;
    }
    if (lo > a) out.emplace_back(a, lo);
    if (hi < b) out.emplace_back(hi, b);
  }
  intervals = std::move(out);
}

void subtract_exclusions(std::vector<std::pair<double, double>>& intervals, Vec2 origin,
                         Vec2 dir, std::span<const Disk> exclusions) {
  for (const Disk& d : exclusions) {
    const Vec2 w = origin - d.center;
    const double b = dir.dot(w);
    const double q = w.norm2() - d.radius * d.radius;
    const double disc = b * b - q;
    if (disc <= 0.0) continue;
    const double root = std::sqrt(disc);
    subtract_chord(intervals, -b - root, -b + root);
    if (intervals.empty()) return;
  }
}

}  // namespace

std::vector<std::pair<double, double>> ray_intervals(const Domain& domain, Vec2 origin,
                                                     Vec2 dir, double tmin,
                                                     std::span<const Disk> exclusions) {
  std::vector<std::pair<double, double>> intervals;
  const double exit = domain.ray_exit(origin, dir);
  if (exit > tmin) {
    intervals.emplace_back(tmin, exit);
    subtract_exclusions(intervals, origin, dir, exclusions);
  }
  return intervals;
}

std::vector<std::pair<double, double>> ray_intervals_disk(const Disk& disk, Vec2 origin,
                                                          Vec2 dir, double tmin,
                                                          std::span<const Disk> exclusions) {
  std::vector<std::pair<double, double>> intervals;
  const Vec2 w = origin - disk.center;
  const double b = dir.dot(w);
  const double q = w.norm2() - disk.radius * disk.radius;
  const double disc = b * b - q;
  if (disc > 0.0) {
    const double root = std::sqrt(disc);
    const double lo = std::max(tmin, -b - root);
    const double hi = -b + root;
    if (hi > lo) {
      intervals.emplace_back(lo, hi);
      subtract_exclusions(intervals, origin, dir, exclusions);
    }
  }
  return intervals;
}

double k_energy_in_domain(const Domain& domain, Vec2 a, double eps,
                          std::span<const Disk> exclusions, const QuadratureSpec& quad) {
  if (eps <= 0.0) throw InvalidArgument("core radius must be positive");
  if (!domain.contains(a) && domain.boundary_distance(a) > 1e-12 * domain.diameter()) {
    throw InvalidArgument("singular point must lie in the closed domain");
  }
  // Radial part of |K|^2 rho drho is exactly d(log rho).
  auto angular = [&](double th) {
    const Vec2 dir{std::cos(th), std::sin(th)};
    double sum = 0.0;
    for (const auto& [lo, hi] : ray_intervals(domain, a, dir, eps, exclusions)) {
      sum += std::log(hi / lo);
    }
    return sum;
  };
  return adaptive_1d(angular, 0.0, kTwoPi, quad.rel_tol, quad.max_depth);
}

namespace {

struct RegionView {
  const Region* region;

  Vec2 center() const {
    if (const Disk* d = std::get_if<Disk>(region)) return d->center;
    const Domain* dom = std::get<const Domain*>(*region);
    // Any interior point works as a slicing center for a convex region.
    Vec2 c{0, 0};
    const auto& smp = dom->samples();
    for (const auto& s : smp) c += s.point;
    return c / static_cast<double>(smp.size());
  }
  double scale() const {
    if (const Disk* d = std::get_if<Disk>(region)) return d->radius;
    return std::get<const Domain*>(*region)->diameter();
  }
  std::vector<std::pair<double, double>> rays(Vec2 origin, Vec2 dir, double tmin,
                                              std::span<const Disk> excl) const {
    if (const Disk* d = std::get_if<Disk>(region)) {
      return ray_intervals_disk(*d, origin, dir, tmin, excl);
    }
    return ray_intervals(*std::get<const Domain*>(*region), origin, dir, tmin, excl);
  }
  double distance_to(Vec2 x) const {
    if (const Disk* d = std::get_if<Disk>(region)) {
      return std::max(0.0, (x - d->center).norm() - d->radius);
    }
    const Domain* dom = std::get<const Domain*>(*region);
    return dom->contains(x) ? 0.0 : dom->boundary_distance(x);
  }
};

}  // namespace

double k_dot_integral(Vec2 y1, Vec2 y2, const Region& region, const QuadratureSpec& quad) {
  if (y1 == y2) throw InvalidArgument("k_dot_integral needs distinct singular points");
  const RegionView view{&region};
  const double sep = distance(y1, y2);
  const double patch_r = std::min(sep / 3.0, view.scale() / 3.0);

  auto f = [&](Vec2 x) { return k_field(y1, x).dot(k_field(y2, x)); };

  double total = 0.0;
  std::vector<Disk> patches;
  for (Vec2 y : {y1, y2}) {
    if (view.distance_to(y) < patch_r) patches.push_back({y, patch_r});
  }

  // Polar patches: rho * (K1 . K2) stays bounded near the centers.
  for (const Disk& patch : patches) {
    auto angular = [&](double th) {
      const Vec2 dir{std::cos(th), std::sin(th)};
      double sum = 0.0;
      for (const auto& [lo, hi] : view.rays(patch.center, dir, 0.0, {})) {
        const double hi_c = std::min(hi, patch.radius);
        if (hi_c <= lo) continue;
        sum += gauss16([&](double t) { return f(patch.center + t * dir) * t; }, lo, hi_c);
      }
      return sum;
    };
    total += adaptive_1d(angular, 0.0, kTwoPi, quad.rel_tol, quad.max_depth);
  }

  // Remainder: slice about the region center with the patches excluded.
  const Vec2 center = view.center();
  auto angular = [&](double th) {
    const Vec2 dir{std::cos(th), std::sin(th)};
    double sum = 0.0;
    for (const auto& [lo, hi] : view.rays(center, dir, 0.0, patches)) {
      sum += adaptive_1d([&](double t) { return f(center + t * dir) * t; }, lo, hi,
                         0.3 * quad.rel_tol, quad.max_depth);
    }
    return sum;
  };
  total += adaptive_1d(angular, 0.0, kTwoPi, quad.rel_tol, quad.max_depth);
  return total;
}

}  // namespace dislocate
