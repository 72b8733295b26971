#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "core/datum.hpp"
#include "core/energy.hpp"
#include "core/geometry.hpp"

namespace dislocate {

enum class CoarsenAction { MergeMidpoint, ProjectToBoundary, Relabel };

struct CoarsenStep {
  CoarsenAction action;
  double s_hat = 0.0;
  double eta_after = 0.0;
  std::vector<Dislocation> snapshot;
};

struct CoarsenTrace {
  std::vector<CoarsenStep> iterations;
  std::vector<Dislocation> final_points;
  double final_eta = 0.0;
  double initial_sbar = 0.0;  // largest ranking value seen at the first pass
};

// Iterative merge-or-project coarsening. Clusters are rebuilt every pass by
// single-linkage at threshold 2*eta with boundary flags within eta of the
// boundary; pass explicit_clusters (index groups over config.points()) to
// supply the grouping instead, as when a limit structure is known.
CoarsenTrace coarsen(const Config& config, double eps, const Domain& domain,
                     const std::optional<std::vector<std::vector<std::size_t>>>&
                         explicit_clusters = std::nullopt);

struct SweepPoint {
  double radius = 0.0;
  double energy = 0.0;
};

struct OptimizationResult {
  Config best_config;
  double best_energy = 0.0;
  long evaluations = 0;
  bool converged = false;
  std::vector<SweepPoint> history;  // grid samples (ngon) or per-start bests
};

// Energy of n dislocations at the vertices of a regular n-gon of the given
// circumradius; exploits the rotational symmetry of constant-strain data.
double ngon_energy(const Domain& domain, const BoundaryDatum& datum, int n, double radius,
                   const QuadratureSpec& quad = {});

// Evaluates the limit energy over a circumradius grid and refines the best
// bracket by golden section to radius_tol.
OptimizationResult ngon_sweep(const Domain& domain, const BoundaryDatum& datum, int n,
                              const std::vector<double>& radii, double radius_tol = 1e-4,
                              const QuadratureSpec& quad = {});
std::vector<double> default_radius_grid(int n);

// Multistart Nelder-Mead over the 2n coordinates. Configurations with any
// separation radius below 1e-4 (or points outside the domain) evaluate to
// +infinity; deterministic for a fixed seed.
OptimizationResult minimize(const Domain& domain, const BoundaryDatum& datum, int n,
                            int starts, std::uint64_t seed,
                            const QuadratureSpec& quad = {});

struct AsymptoticsRow {
  int n = 0;
  double radius = 0.0;
  double energy = 0.0;
  double dist_to_boundary = 0.0;
  long evaluations = 0;
};

struct AsymptoticsStudy {
  std::vector<AsymptoticsRow> rows;
  double dist_slope = 0.0;    // log dist vs log n
  double energy_slope = 0.0;  // log |energy| vs log n
  int fit_min = 0;
  int fit_max = 0;
};

// n-gon sweeps over a range of n with log-log slope fits over [fit_min,
// fit_max] (defaults to the upper half of the range).
AsymptoticsStudy asymptotics_study(const Domain& domain, int n_min, int n_max,
                                   int fit_min = 0, int fit_max = 0,
                                   const QuadratureSpec& quad = {});

}  // namespace dislocate
