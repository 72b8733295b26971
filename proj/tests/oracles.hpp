#pragma once

// Test-only oracles, deliberately independent of the library's production
// integration and solver paths:
//  - midpoint-rule integrals in polar coordinates,
//  - an exact annulus series for the single-core energy on the disk via a
//    disk automorphism,
//  - a cut-jump finite-difference grid solver for the perforated energy.

#include <functional>
#include <vector>

#include "core/geometry.hpp"
#include "core/types.hpp"

namespace oracles {

// Midpoint sum of f over the unit-disk region Omega_eps(a; exclusions) in
// polar coordinates about a: cells uniform in angle and radius.
double midpoint_polar_disk(dislocate::Vec2 a, double eps,
                           const std::vector<dislocate::Disk>& exclusions,
                           const std::function<double(dislocate::Vec2)>& f, int n_angle,
                           int n_radial, double disk_radius = 1.0);

// Midpoint sum of f over a disk region with polar desingularization about
// center (which may differ from the region center).
double midpoint_polar_region(dislocate::Vec2 center, const dislocate::Disk& region,
                             const std::function<double(dislocate::Vec2)>& f, int n_angle,
                             int n_radial);

// Exact core-radius energy for ONE dislocation at a = (ax, 0) in the unit
// disk with primitive g (a function of the boundary angle, winding once):
// maps the eccentric annulus onto a concentric one and sums the series.
double annulus_series_energy(double ax, double eps,
                             const std::function<double(double)>& g_of_angle,
                             int modes = 4096);

// Cut-jump finite-difference energy for the full displacement on the unit
// disk minus the cores: 5-point grid on [-pad, pad]^2 with N nodes per side,
// Dirichlet g on the outer boundary (function of angle), jumps of
// 2*pi*multiplicity across the cut segments a_i -> (1, 0), natural (zero
// Neumann) staircase core circles. Returns the discrete Dirichlet energy.
double grid_core_energy(const std::vector<dislocate::Dislocation>& points, double eps,
                        const std::function<double(double)>& g_of_angle, int n_side,
                        double* iterations_used = nullptr);

}  // namespace oracles
