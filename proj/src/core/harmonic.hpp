#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include "core/datum.hpp"
#include "core/geometry.hpp"
#include "core/types.hpp"

namespace dislocate {

// Boundary data as a function of arclength plus its known non-smooth points.
struct BoundaryFunc {
  std::function<double(double)> value;
  std::vector<double> kinks;
};

struct SolverOpts {
  int fourier_modes = 1024;      // disk series truncation
  int mfs_boundary_sources = 160;
  int mfs_core_sources = 24;
  int oversample = 4;            // collocation nodes per source
  double source_offset = 0.25;   // fraction of diam outside the boundary
  double core_source_radius = 0.5;  // fraction of the core radius
  double svd_threshold = 1e-12;  // relative singular value cutoff
  double residual_tol = 2e-3;    // allowed relative sup residual
  bool prefer_mfs = false;       // use MFS even on the disk
};

// Interior-harmonic series on a disk, optionally with log and negative-power
// terms when an inner boundary exists.
struct FourierDisk {
  Vec2 center;
  double radius = 1.0;
  double a0 = 0.0;
  double log_coeff = 0.0;
  std::vector<double> pos_cos, pos_sin;  // (r/R)^k, k = 1..K
  std::vector<double> neg_cos, neg_sin;  // (r/R)^-k
};

// Fundamental-solution representation: free log charges plus a fixed singular
// part and a constant.
struct Mfs {
  std::vector<Vec2> sources;
  std::vector<double> charges;
  std::vector<Vec2> fixed_centers;
  std::vector<double> fixed_strengths;
  double constant = 0.0;
};

class HarmonicSolution {
 public:
  HarmonicSolution(FourierDisk rep, double residual)
      : rep_(std::move(rep)), residual_(residual) {}
  HarmonicSolution(Mfs rep, double residual) : rep_(std::move(rep)), residual_(residual) {}

  double evaluate(Vec2 x) const;
  Vec2 gradient(Vec2 x) const;
  double boundary_residual() const { return residual_; }

  bool is_fourier() const { return std::holds_alternative<FourierDisk>(rep_); }
  const FourierDisk& fourier() const { return std::get<FourierDisk>(rep_); }
  const Mfs& mfs() const { return std::get<Mfs>(rep_); }

  // Linear combination with the same source geometry (Fourier sizes or MFS
  // source lists must match).
  static HarmonicSolution combine(const std::vector<const HarmonicSolution*>& parts,
                                  const std::vector<double>& weights);

  // 1/2 int |grad|^2 over a concentric disk or annulus; exact for series.
  double series_energy(double r_outer, double r_inner = 0.0) const;

  void dump(std::ostream& os) const;

 private:
  std::variant<FourierDisk, Mfs> rep_;
  double residual_ = 0.0;
};

HarmonicSolution solve_dirichlet(const Domain& domain, const BoundaryFunc& datum,
                                 const SolverOpts& opts = {});
// Compatible flux (zero mean); solution normalized to zero boundary mean.
HarmonicSolution solve_neumann(const Domain& domain, const BoundaryFunc& flux,
                               const SolverOpts& opts = {});

// Harmonic in the domain minus the core disks B_eps(a_i): Dirichlet data on
// the outer boundary, Neumann data on each core circle (function of the polar
// angle about the core center). Cores must be pairwise disjoint and interior.
HarmonicSolution solve_mixed_perforated(
    const Domain& domain, const Config& config, double eps, const BoundaryFunc& dirichlet,
    const std::vector<std::function<double(double)>>& core_flux,
    const SolverOpts& opts = {});

// Conjugate problem: zero flux on the outer boundary, prescribed tangential
// data on the core circles (p = -log|x - a_i| + c_j on core j != i, p = 0 on
// core i), zero net flux through every core.
HarmonicSolution solve_p(const Domain& domain, const Config& config, double eps, int i,
                         const SolverOpts& opts = {});

}  // namespace dislocate
