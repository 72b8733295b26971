#pragma once

#include <optional>
#include <string>

#include "core/datum.hpp"
#include "core/geometry.hpp"
#include "core/harmonic.hpp"
#include "core/types.hpp"

namespace dislocate {

enum class EnergyMode { Limit, CoreRadius };

// Term-by-term breakdown of the renormalized energy. In Limit mode the log
// term is sum_i pi log d_i; in CoreRadius mode it is the subtracted
// -pi n |log eps|. total always equals the sum of the five terms.
struct EnergyReport {
  EnergyMode mode = EnergyMode::Limit;
  double epsilon = 0.0;
  int n = 0;
  bool infinite = false;
  double total = 0.0;
  double log_term = 0.0;
  double regular_energy = 0.0;
  double k_self = 0.0;
  double cross = 0.0;
  double pair = 0.0;
  double error_estimate = 0.0;

  static std::string csv_header();
  std::string csv_row() const;
};

// The limit functional: finite for distinct interior simple dislocations,
// +infinity otherwise (reported, not thrown).
EnergyReport renormalized_energy(const Domain& domain, const BoundaryDatum& datum,
                                 const Config& config, const QuadratureSpec& quad = {});

// Per-dislocation self energy and pairwise interaction of the rotated
// decomposition; their sum reproduces the limit functional.
double self_energy(const Domain& domain, const BoundaryDatum& datum, const Config& config,
                   std::size_t i, const QuadratureSpec& quad = {});
double interaction_energy(const Domain& domain, const BoundaryDatum& datum,
                          const Config& config, std::size_t i, std::size_t j,
                          const QuadratureSpec& quad = {});

// Finite core-radius energy via the displacement formulation. Requires
// pairwise disjoint interior cores; by default also eps < min_i d_i / 2
// (relax_guard lifts only the latter).
EnergyReport core_energy(const Domain& domain, const BoundaryDatum& datum,
                         const Config& config, double eps, const QuadratureSpec& quad = {},
                         bool relax_guard = false);

// Renormalized energy of the single-dislocation subproblem at point i
// (1/n-scaled primitive), a building block of the decomposition below.
double single_core_renormalized(const Domain& domain, const BoundaryDatum& datum,
                                const Config& config, double eps, std::size_t i,
                                const QuadratureSpec& quad = {});

// Remainder and pairwise interaction at finite core radius; together with the
// single-dislocation energies they reassemble the full core-radius energy.
double remainder_eps(const Domain& domain, const BoundaryDatum& datum, const Config& config,
                     double eps, std::size_t i, const QuadratureSpec& quad = {});
double interaction_eps(const Domain& domain, const BoundaryDatum& datum,
                       const Config& config, double eps, std::size_t i, std::size_t j,
                       const QuadratureSpec& quad = {});

struct CutInvarianceReport {
  double energy_a = 0.0;
  double energy_b = 0.0;
  double discrepancy = 0.0;
};

// Energies computed from two primitives of the same strain with different
// base/jump bookkeeping must agree; eps = 0 compares limit energies.
CutInvarianceReport cut_invariance_check(const Domain& domain, const BoundaryDatum& datum_a,
                                         const BoundaryDatum& datum_b, const Config& config,
                                         double eps, const QuadratureSpec& quad = {});

}  // namespace dislocate
