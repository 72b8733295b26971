#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "core/fields.hpp"
#include "core/geometry.hpp"
#include "core/types.hpp"

namespace dislocate {

struct DatumJump {
  double arc = 0.0;  // position relative to the base, in (0, L]; L means the
                     // jump sits at the base wrap point
  int multiplicity = 1;
};

// Tangential strain f on the boundary with total circulation 2*pi*n, together
// with a base point and the jump bookkeeping of its primitive g. g follows the
// convention g(base+) = 0 and drops by 2*pi*m_j past jump j. Immutable.
class BoundaryDatum {
 public:
  using Fn = std::function<double(double)>;

  // f and its exact antiderivative measured from the base point
  // (arc in [0, L] -> integral of f over that arc).
  static BoundaryDatum make(const Domain& domain, Fn f, Fn f_antiderivative,
                            double base_param, std::vector<DatumJump> jumps,
                            std::vector<double> f_kink_params, double circulation_tol = 1e-9);
  // f sampled/callable only; the antiderivative is tabulated by quadrature.
  static BoundaryDatum from_function(const Domain& domain, Fn f, Vec2 base,
                                     const std::vector<std::pair<Vec2, int>>& jumps,
                                     double circulation_tol = 1e-9);

  // Presets. g1 = unit circulation, g2 = the half-on half-off profile on the
  // disk, f_const(n) = uniform strain with circulation 2*pi*n.
  static BoundaryDatum preset_g1(const Domain& domain);
  static BoundaryDatum preset_g2(const Domain& domain);
  static BoundaryDatum preset_const(const Domain& domain, int n);
  static BoundaryDatum from_file(const Domain& domain, const std::string& path);

  int total() const { return n_; }
  double base_param() const { return base_; }
  const std::vector<DatumJump>& jumps() const { return jumps_; }

  double f(double s) const;
  // Primitive with jumps: g(s) = F(arc(s)) - 2*pi * (multiplicity passed).
  double g(double s) const;
  // Per-jump primitive: (1/n) F(arc(s)) - 2*pi * [past jump j].
  double g_single(double s, std::size_t jump_index) const;
  // Integral of f from the base to s along the counterclockwise arc.
  double integral_from_base(double s) const;
  double total_variation() const;  // integral of |f|
  // Arclength parameters (raw s) where f or g may be non-smooth; used to
  // split boundary quadratures.
  std::vector<double> kink_params() const;
  bool rotation_invariant() const { return rotation_invariant_; }

 private:
  const Domain* domain_ = nullptr;
  Fn f_;
  Fn antiderivative_;  // of arc from base
  double base_ = 0.0;
  double length_ = 0.0;
  int n_ = 0;
  std::vector<DatumJump> jumps_;
  std::vector<double> f_kinks_;  // arc positions relative to base
  bool rotation_invariant_ = false;
};

// Produces a valid BoundaryDatum or throws; exposed as the primitive-building
// entry point (circulation and ordering are validated).
BoundaryDatum build_primitive(const Domain& domain, BoundaryDatum::Fn f, Vec2 base,
                              const std::vector<std::pair<Vec2, int>>& jumps,
                              double circulation_tol = 1e-9);

// Branch cuts for the dislocations of a configuration: each dislocation is
// cut along the ray through its assigned jump point (interior points) or the
// outward normal (boundary points). The assignment requires the jump
// multiplicities to match the configuration.
std::vector<BranchCut> assign_cuts(const Domain& domain, const BoundaryDatum& datum,
                                   const Config& config);

// Continuous Dirichlet data on the boundary assembled from the primitive and
// the angle traces.
struct CompositeDatum {
  // D(s) = g(s) - sum_i w_i * theta_i(gamma(s)), continuous on the boundary.
  std::function<double(double)> value;
  std::vector<double> kinks;  // raw arclength split points for quadrature
  double sup = 0.0;           // coarse sup bound, for diagnostics
};

// w_i = multiplicity_i * omega_i. which < 0 builds the full sum; which = i
// builds the single-dislocation datum g_{b_i} - omega_i * theta_i.
CompositeDatum composite_dirichlet(const Domain& domain, const BoundaryDatum& datum,
                                   const Config& config, int which = -1);

}  // namespace dislocate
