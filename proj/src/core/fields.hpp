#pragma once

#include <span>
#include <variant>
#include <vector>

#include "core/geometry.hpp"
#include "core/types.hpp"

namespace dislocate {

// K_a(x) = grad^perp log|x-a| = theta_hat / rho; circulation 2*pi around a.
Vec2 k_field(Vec2 a, Vec2 x);

// Half line from anchor along direction; the angle function jumps by 2*pi
// across it and is continuous elsewhere.
struct BranchCut {
  Vec2 anchor;
  Vec2 direction;  // unit vector

  static BranchCut through(Vec2 anchor, Vec2 boundary_point);
};

// Angular coordinate centered at cut.anchor with range
// (phi_cut, phi_cut + 2*pi]; its a.e. gradient is k_field.
// Throws when x sits exactly on the cut half-line.
double theta_branch(const BranchCut& cut, Vec2 x);

// Same angle but on the cut returns the counterclockwise limit; quadrature
// nodes occasionally land exactly on a cut endpoint.
double theta_branch_onesided(const BranchCut& cut, Vec2 x);

// Integral of |K|^2 over the annulus eps < rho < R: exactly 2*pi*log(R/eps).
double annulus_k_energy(double eps, double R);

// Integral of |K_a|^2 over the domain minus B_eps(a) minus the exclusion
// disks, by exact radial integration and adaptive angular quadrature.
double k_energy_in_domain(const Domain& domain, Vec2 a, double eps,
                          std::span<const Disk> exclusions, const QuadratureSpec& quad);

// Region for the pair integral: either a disk or the full domain.
using Region = std::variant<Disk, const Domain*>;

// Integral of K_{y1} . K_{y2} over the region, with polar patches around the
// singular points.
double k_dot_integral(Vec2 y1, Vec2 y2, const Region& region, const QuadratureSpec& quad);

// Radial intervals of {origin + t*dir} inside the domain (or disk) minus the
// exclusion disks, clipped to t >= tmin. Building block for polar slicing.
std::vector<std::pair<double, double>> ray_intervals(const Domain& domain, Vec2 origin,
                                                     Vec2 dir, double tmin,
                                                     std::span<const Disk> exclusions);
std::vector<std::pair<double, double>> ray_intervals_disk(const Disk& disk, Vec2 origin,
                                                          Vec2 dir, double tmin,
                                                          std::span<const Disk> exclusions);

}  // namespace dislocate
