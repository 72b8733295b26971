#include "core/harmonic.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>

#include "core/fft.hpp"
#include "core/quad.hpp"

namespace dislocate {

namespace {

double sup_scale(const BoundaryFunc& f, double length) {
  double sup = 0.0;
  for (int i = 0; i < 256; ++i) {
    sup = std::max(sup, std::abs(f.value((i + 0.31) * length / 256)));
  }
  return std::max(1.0, sup);
}

int pow2_at_least(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

double HarmonicSolution::evaluate(Vec2 x) const {
  if (const FourierDisk* f = std::get_if<FourierDisk>(&rep_)) {
    const std::complex<double> z((x.x - f->center.x) / f->radius,
                                 (x.y - f->center.y) / f->radius);
    double v = f->a0;
    if (f->log_coeff != 0.0) v += f->log_coeff * std::log(std::abs(z));
    std::complex<double> zp(1.0, 0.0);
    for (std::size_t k = 0; k < f->pos_cos.size(); ++k) {
      zp *= z;
      v += f->pos_cos[k] * zp.real() + f->pos_sin[k] * zp.imag();
    }
    if (!f->neg_cos.empty()) {
      const std::complex<double> zi = 1.0 / z;
      std::complex<double> zn(1.0, 0.0);
      for (std::size_t k = 0; k < f->neg_cos.size(); ++k) {
        zn *= zi;
        v += f->neg_cos[k] * zn.real() + f->neg_sin[k] * zn.imag();
      }
    }
    return v;
  }
  const Mfs& m = std::get<Mfs>(rep_);
  double v = m.constant;
  for (std::size_t j = 0; j < m.sources.size(); ++j) {
    v += m.charges[j] * std::log((x - m.sources[j]).norm());
  }
  for (std::size_t j = 0; j < m.fixed_centers.size(); ++j) {
    v += m.fixed_strengths[j] * std::log((x - m.fixed_centers[j]).norm());
  }
  return v;
}

Vec2 HarmonicSolution::gradient(Vec2 x) const {
  if (const FourierDisk* f = std::get_if<FourierDisk>(&rep_)) {
    const std::complex<double> z((x.x - f->center.x) / f->radius,
                                 (x.y - f->center.y) / f->radius);
    // u = Re F(z); grad u = (Re F', -Im F') / R.
    std::complex<double> dF(0.0, 0.0);
    if (f->log_coeff != 0.0) dF += f->log_coeff / z;
    std::complex<double> zp(1.0, 0.0);
    for (std::size_t k = 0; k < f->pos_cos.size(); ++k) {
      const std::complex<double> ck(f->pos_cos[k], -f->pos_sin[k]);
      dF += ck * (static_cast<double>(k + 1) * zp);
      zp *= z;
    }
    if (!f->neg_cos.empty()) {
      const std::complex<double> zi = 1.0 / z;
      std::complex<double> zn = zi;
      for (std::size_t k = 0; k < f->neg_cos.size(); ++k) {
        const std::complex<double> dk(f->neg_cos[k], -f->neg_sin[k]);
        dF -= dk * (static_cast<double>(k + 1) * zn * zi);
        zn *= zi;
      }
    }
    return Vec2{dF.real(), -dF.imag()} / f->radius;
  }
  const Mfs& m = std::get<Mfs>(rep_);
  Vec2 g{0, 0};
  for (std::size_t j = 0; j < m.sources.size(); ++j) {
    const Vec2 r = x - m.sources[j];
    g += m.charges[j] / r.norm2() * r;
  }
  for (std::size_t j = 0; j < m.fixed_centers.size(); ++j) {
    const Vec2 r = x - m.fixed_centers[j];
    g += m.fixed_strengths[j] / r.norm2() * r;
  }
  return g;
}

HarmonicSolution HarmonicSolution::combine(const std::vector<const HarmonicSolution*>& parts,
                                           const std::vector<double>& weights) {
  if (parts.empty() || parts.size() != weights.size()) {
    throw InvalidArgument("combine needs matching parts and weights");
  }
  double residual = 0.0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    residual += std::abs(weights[i]) * parts[i]->boundary_residual();
  }
  if (parts[0]->is_fourier()) {
    FourierDisk out = parts[0]->fourier();
    auto scale = [&](std::vector<double>& v, double w) {
      for (double& x : v) x *= w;
    };
    scale(out.pos_cos, weights[0]);
    scale(out.pos_sin, weights[0]);
    scale(out.neg_cos, weights[0]);
    scale(out.neg_sin, weights[0]);
    out.a0 *= weights[0];
    out.log_coeff *= weights[0];
    for (std::size_t i = 1; i < parts.size(); ++i) {
      const FourierDisk& f = parts[i]->fourier();
      if (f.pos_cos.size() != out.pos_cos.size() || f.center != out.center ||
          f.radius != out.radius) {
        throw InvalidArgument("combine: incompatible series");
      }
      out.a0 += weights[i] * f.a0;
      out.log_coeff += weights[i] * f.log_coeff;
      for (std::size_t k = 0; k < out.pos_cos.size(); ++k) {
        out.pos_cos[k] += weights[i] * f.pos_cos[k];
        out.pos_sin[k] += weights[i] * f.pos_sin[k];
      }
      for (std::size_t k = 0; k < out.neg_cos.size(); ++k) {
        out.neg_cos[k] += weights[i] * f.neg_cos[k];
        out.neg_sin[k] += weights[i] * f.neg_sin[k];
      }
    }
    return HarmonicSolution(std::move(out), residual);
  }
  Mfs out = parts[0]->mfs();
  for (double& q : out.charges) q *= weights[0];
  for (double& q : out.fixed_strengths) q *= weights[0];
  out.constant *= weights[0];
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const Mfs& m = parts[i]->mfs();
    if (m.sources.size() != out.sources.size()) {
      throw InvalidArgument("combine: incompatible source sets");
    }
    out.constant += weights[i] * m.constant;
    for (std::size_t j = 0; j < out.charges.size(); ++j) {
      out.charges[j] += weights[i] * m.charges[j];
    }
    for (std::size_t j = 0; j < m.fixed_centers.size(); ++j) {
      out.fixed_centers.push_back(m.fixed_centers[j]);
      out.fixed_strengths.push_back(weights[i] * m.fixed_strengths[j]);
    }
  }
  return HarmonicSolution(std::move(out), residual);
}

double HarmonicSolution::series_energy(double r_outer, double r_inner) const {
  const FourierDisk& f = std::get<FourierDisk>(rep_);
  const double to = r_outer / f.radius;
  const double ti = r_inner / f.radius;
  double e = 0.0;
  if (f.log_coeff != 0.0) {
    if (ti <= 0.0) throw InvalidArgument("log term needs an annulus");
    e += kTwoPi * f.log_coeff * f.log_coeff * std::log(to / ti);
  }
  for (std::size_t k0 = 0; k0 < f.pos_cos.size(); ++k0) {
    const double k = static_cast<double>(k0 + 1);
    const double amp2 = f.pos_cos[k0] * f.pos_cos[k0] + f.pos_sin[k0] * f.pos_sin[k0];
    e += kPi * k * amp2 * (std::pow(to, 2.0 * k) - std::pow(ti, 2.0 * k));
  }
  for (std::size_t k0 = 0; k0 < f.neg_cos.size(); ++k0) {
    const double k = static_cast<double>(k0 + 1);
    const double amp2 = f.neg_cos[k0] * f.neg_cos[k0] + f.neg_sin[k0] * f.neg_sin[k0];
    if (ti <= 0.0) throw InvalidArgument("negative powers need an annulus");
    e += kPi * k * amp2 * (std::pow(ti, -2.0 * k) - std::pow(to, -2.0 * k));
  }
  return 0.5 * e;
}

void HarmonicSolution::dump(std::ostream& os) const {
  os << "# harmonic solution dump v1\n";
  os << "residual " << residual_ << "\n";
  if (const FourierDisk* f = std::get_if<FourierDisk>(&rep_)) {
    os << "kind fourier_disk\n";
    os << "center " << f->center.x << " " << f->center.y << "\n";
    os << "radius " << f->radius << "\n";
    os << "a0 " << f->a0 << "\n";
    os << "log " << f->log_coeff << "\n";
    for (std::size_t k = 0; k < f->pos_cos.size(); ++k) {
      os << "mode " << (k + 1) << " " << f->pos_cos[k] << " " << f->pos_sin[k] << "\n";
    }
    for (std::size_t k = 0; k < f->neg_cos.size(); ++k) {
      os << "negmode " << (k + 1) << " " << f->neg_cos[k] << " " << f->neg_sin[k] << "\n";
    }
    return;
  }
  const Mfs& m = std::get<Mfs>(rep_);
  os << "kind mfs\n";
  os << "const " << m.constant << "\n";
  for (std::size_t j = 0; j < m.sources.size(); ++j) {
    os << "charge " << m.sources[j].x << " " << m.sources[j].y << " " << m.charges[j]
       << "\n";
  }
  for (std::size_t j = 0; j < m.fixed_centers.size(); ++j) {
    os << "fixed " << m.fixed_centers[j].x << " " << m.fixed_centers[j].y << " "
       << m.fixed_strengths[j] << "\n";
  }
}

namespace {

// ---------- Fourier solves on the disk ----------

HarmonicSolution fourier_dirichlet(const Domain& domain, const BoundaryFunc& datum,
                                   const SolverOpts& opts) {
  const double R = domain.disk_radius();
  const int K = opts.fourier_modes;
  const int N = pow2_at_least(4 * K);
  std::vector<double> samples(N);
  for (int j = 0; j < N; ++j) {
    samples[j] = datum.value((j + 0.5) * domain.length() / N);
  }
  const FourierCoeffs c = fourier_coeffs(samples, K);

  FourierDisk rep;
  rep.center = {0, 0};
  rep.radius = R;
  rep.a0 = c.cos_c[0];
  rep.pos_cos.assign(c.cos_c.begin() + 1, c.cos_c.end());
  rep.pos_sin.assign(c.sin_c.begin() + 1, c.sin_c.end());
  HarmonicSolution sol(std::move(rep), 0.0);

  double residual = 0.0;
  const int M = 509;
  for (int j = 0; j < M; ++j) {
    const double s = (j + 0.23) * domain.length() / M;
    residual = std::max(residual,
                        std::abs(sol.evaluate(domain.point_at(s)) - datum.value(s)));
  }
  const double scale = sup_scale(datum, domain.length());
  if (residual > opts.residual_tol * scale) {
    throw SolverError("disk Dirichlet series residual above tolerance");
  }
  return HarmonicSolution(sol.fourier(), residual);
}

HarmonicSolution fourier_neumann(const Domain& domain, const BoundaryFunc& flux,
                                 const SolverOpts& opts) {
  const double R = domain.disk_radius();
  const int K = opts.fourier_modes;
  const int N = pow2_at_least(4 * K);
  std::vector<double> samples(N);
  for (int j = 0; j < N; ++j) {
    samples[j] = flux.value((j + 0.5) * domain.length() / N);
  }
  const FourierCoeffs c = fourier_coeffs(samples, K);
  const double scale = sup_scale(flux, domain.length());
  if (std::abs(c.cos_c[0]) > 1e-8 * scale) {
    throw InvalidArgument("incompatible Neumann flux: nonzero mean");
  }

  FourierDisk rep;
  rep.center = {0, 0};
  rep.radius = R;
  rep.a0 = 0.0;  // zero boundary mean
  rep.pos_cos.resize(K);
  rep.pos_sin.resize(K);
  for (int k = 1; k <= K; ++k) {
    rep.pos_cos[k - 1] = R * c.cos_c[k] / k;
    rep.pos_sin[k - 1] = R * c.sin_c[k] / k;
  }
  HarmonicSolution sol(std::move(rep), 0.0);

  double residual = 0.0;
  const int M = 509;
  for (int j = 0; j < M; ++j) {
    const double s = (j + 0.23) * domain.length() / M;
    const Vec2 x = domain.point_at(s);
    const Vec2 nu = domain.normal_at(s);
    residual = std::max(residual, std::abs(sol.gradient(x).dot(nu) - flux.value(s)));
  }
  if (residual > opts.residual_tol * scale) {
    throw SolverError("disk Neumann series residual above tolerance");
  }
  return HarmonicSolution(sol.fourier(), residual);
}

// ---------- MFS machinery ----------

struct MfsProblem {
  std::vector<Vec2> sources;
  // Flux locks: groups of source indices whose charges must sum to zero.
  std::vector<std::vector<std::size_t>> zero_flux_groups;
  bool with_constant = false;
  int free_offsets = 0;  // per-core Dirichlet offsets (solve_p)

  struct Row {
    Vec2 x;
    Vec2 normal;     // used when neumann
    bool neumann = false;
    double rhs = 0.0;
    double weight = 1.0;
    int offset_index = -1;  // row rhs gains +c_k for this free offset
  };
  std::vector<Row> rows;

  std::vector<Vec2> fixed_centers;
  std::vector<double> fixed_strengths;
};

double fixed_part_value(const MfsProblem& p, Vec2 x) {
  double v = 0.0;
  for (std::size_t j = 0; j < p.fixed_centers.size(); ++j) {
    v += p.fixed_strengths[j] * std::log((x - p.fixed_centers[j]).norm());
  }
  return v;
}

Vec2 fixed_part_gradient(const MfsProblem& p, Vec2 x) {
  Vec2 g{0, 0};
  for (std::size_t j = 0; j < p.fixed_centers.size(); ++j) {
    const Vec2 r = x - p.fixed_centers[j];
    g += p.fixed_strengths[j] / r.norm2() * r;
  }
  return g;
}

Mfs solve_mfs(const MfsProblem& p, const SolverOpts& opts) {
  const std::size_t nsrc = p.sources.size();
  // Eliminate one charge per zero-flux group.
  std::vector<int> col_of(nsrc, -1);
  std::vector<std::size_t> group_last(nsrc, SIZE_MAX);  // source -> anchor source
  int ncols = 0;
  std::vector<bool> in_group(nsrc, false);
  for (const auto& g : p.zero_flux_groups) {
    for (std::size_t s : g) in_group[s] = true;
  }
  for (std::size_t s = 0; s < nsrc; ++s) {
    if (!in_group[s]) col_of[s] = ncols++;
  }
  std::vector<std::pair<std::size_t, std::size_t>> folded;  // (source, anchor)
  for (const auto& g : p.zero_flux_groups) {
    const std::size_t anchor = g.back();
    for (std::size_t idx = 0; idx + 1 < g.size(); ++idx) {
      col_of[g[idx]] = ncols++;
      folded.emplace_back(g[idx], anchor);
    }
  }
  const int const_col = p.with_constant ? ncols++ : -1;
  const int offset_col0 = ncols;
  ncols += p.free_offsets;

  const std::size_t nrows = p.rows.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nrows, ncols);
  Eigen::VectorXd b(nrows);

  auto basis_value = [&](std::size_t src, const MfsProblem::Row& row) {
    const Vec2 r = row.x - p.sources[src];
    if (row.neumann) {
      return row.normal.dot(r) / r.norm2();
    }
    return std::log(r.norm());
  };

  for (std::size_t i = 0; i < nrows; ++i) {
    const auto& row = p.rows[i];
    double rhs = row.rhs;
    if (row.neumann) {
      rhs -= fixed_part_gradient(p, row.x).dot(row.normal);
    } else {
      rhs -= fixed_part_value(p, row.x);
    }
    b(i) = rhs * row.weight;
    for (std::size_t s = 0; s < nsrc; ++s) {
      if (col_of[s] >= 0) {
        A(i, col_of[s]) += basis_value(s, row) * row.weight;
      }
    }
    for (const auto& [src, anchor] : folded) {
      // charge(anchor) = -sum of the group's free charges
      A(i, col_of[src]) -= basis_value(anchor, row) * row.weight;
    }
    if (const_col >= 0 && !row.neumann) A(i, const_col) += row.weight;
    if (row.offset_index >= 0) A(i, offset_col0 + row.offset_index) -= row.weight;
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(opts.svd_threshold);
  const Eigen::VectorXd x = svd.solve(b);

  Mfs out;
  out.sources = p.sources;
  out.charges.assign(nsrc, 0.0);
  for (std::size_t s = 0; s < nsrc; ++s) {
    if (col_of[s] >= 0) out.charges[s] = x(col_of[s]);
  }
  for (const auto& [src, anchor] : folded) {
    out.charges[anchor] -= x(col_of[src]);
  }
  out.constant = const_col >= 0 ? x(const_col) : 0.0;
  out.fixed_centers = p.fixed_centers;
  out.fixed_strengths = p.fixed_strengths;
  return out;
}

void add_exterior_sources(MfsProblem& p, const Domain& domain, const SolverOpts& opts) {
  const int ns = opts.mfs_boundary_sources;
  const double offset = opts.source_offset * domain.diameter();
  for (int j = 0; j < ns; ++j) {
    const double s = (j + 0.5) * domain.length() / ns;
    p.sources.push_back(domain.point_at(s) + offset * domain.normal_at(s));
  }
}

void add_outer_rows(MfsProblem& p, const Domain& domain, const SolverOpts& opts,
                    const std::function<double(double)>& rhs, bool neumann) {
  const int nrows = opts.oversample * opts.mfs_boundary_sources;
  const double w = std::sqrt(domain.length() / nrows);
  for (int j = 0; j < nrows; ++j) {
    const double s = (j + 0.5) * domain.length() / nrows;
    MfsProblem::Row row;
    row.x = domain.point_at(s);
    row.normal = domain.normal_at(s);
    row.neumann = neumann;
    row.rhs = rhs(s);
    row.weight = w;
    p.rows.push_back(row);
  }
}

struct CoreGeometry {
  Vec2 center;
  double eps;
};

void add_core_sources(MfsProblem& p, const CoreGeometry& core, const SolverOpts& opts) {
  std::vector<std::size_t> group;
  const int ns = opts.mfs_core_sources;
  const double r = opts.core_source_radius * core.eps;
  for (int j = 0; j < ns; ++j) {
    const double phi = (j + 0.5) * kTwoPi / ns;
    group.push_back(p.sources.size());
    p.sources.push_back(core.center + Vec2{r * std::cos(phi), r * std::sin(phi)});
  }
  p.zero_flux_groups.push_back(std::move(group));
}

void add_core_rows(MfsProblem& p, const CoreGeometry& core, const SolverOpts& opts,
                   const std::function<double(double)>& rhs, bool neumann,
                   int offset_index = -1) {
  const int nrows = opts.oversample * opts.mfs_core_sources;
  const double w = std::sqrt(kTwoPi * core.eps / nrows);
  for (int j = 0; j < nrows; ++j) {
    const double phi = (j + 0.5) * kTwoPi / nrows;
    const Vec2 nu{std::cos(phi), std::sin(phi)};  // outward from the core center
    MfsProblem::Row row;
    row.x = core.center + core.eps * nu;
    // Outward normal of the perforated domain points into the core.
    row.normal = -nu;
    row.neumann = neumann;
    row.rhs = rhs(phi);
    row.weight = w;
    row.offset_index = offset_index;
    p.rows.push_back(row);
  }
}

double mfs_validation_residual(const HarmonicSolution& sol, const Domain& domain,
                               const BoundaryFunc* dirichlet,
                               const std::vector<CoreGeometry>& cores,
                               const std::vector<std::function<double(double)>>& core_flux) {
  double res = 0.0;
  if (dirichlet != nullptr) {
    const int M = 401;
    for (int j = 0; j < M; ++j) {
      const double s = (j + 0.29) * domain.length() / M;
      res = std::max(res,
                     std::abs(sol.evaluate(domain.point_at(s)) - dirichlet->value(s)));
    }
  }
  for (std::size_t i = 0; i < cores.size(); ++i) {
    const int M = 101;
    for (int j = 0; j < M; ++j) {
      const double phi = (j + 0.29) * kTwoPi / M;
      const Vec2 nu{std::cos(phi), std::sin(phi)};
      const Vec2 x = cores[i].center + cores[i].eps * nu;
      const double got = sol.gradient(x).dot(-nu);
      res = std::max(res, std::abs(got - core_flux[i](phi)));
    }
  }
  return res;
}

std::vector<CoreGeometry> core_geometry(const Domain& domain, const Config& config,
                                        double eps) {
  const auto& pts = config.points();
  std::vector<CoreGeometry> cores;
  for (const auto& pt : pts) {
    if (domain.boundary_distance(pt.position) <= eps || !domain.contains(pt.position)) {
      throw InvalidArgument("core disk is not strictly inside the domain");
    }
    cores.push_back({pt.position, eps});
  }
  for (std::size_t i = 0; i < cores.size(); ++i) {
    for (std::size_t j = i + 1; j < cores.size(); ++j) {
      if (distance(cores[i].center, cores[j].center) <= 2.0 * eps) {
        throw InvalidArgument("overlapping core disks; coarsen the configuration first");
      }
    }
  }
  return cores;
}

}  // namespace

HarmonicSolution solve_dirichlet(const Domain& domain, const BoundaryFunc& datum,
                                 const SolverOpts& opts) {
  if (domain.is_disk() && !opts.prefer_mfs) return fourier_dirichlet(domain, datum, opts);

  MfsProblem p;
  p.with_constant = true;
  add_exterior_sources(p, domain, opts);
  add_outer_rows(p, domain, opts, datum.value, /*neumann=*/false);
  Mfs rep = solve_mfs(p, opts);
  HarmonicSolution sol(std::move(rep), 0.0);
  const double residual = mfs_validation_residual(sol, domain, &datum, {}, {});
  if (residual > opts.residual_tol * sup_scale(datum, domain.length())) {
    throw SolverError("MFS Dirichlet residual above tolerance");
  }
  return HarmonicSolution(sol.mfs(), residual);
}

HarmonicSolution solve_neumann(const Domain& domain, const BoundaryFunc& flux,
                               const SolverOpts& opts) {
  if (domain.is_disk() && !opts.prefer_mfs) return fourier_neumann(domain, flux, opts);

  const double mean =
      adaptive_1d(flux.value, 0.0, domain.length(), 1e-9, 18) / domain.length();
  if (std::abs(mean) > 1e-6 * sup_scale(flux, domain.length())) {
    throw InvalidArgument("incompatible Neumann flux: nonzero mean");
  }
  MfsProblem p;
  p.with_constant = false;
  add_exterior_sources(p, domain, opts);
  add_outer_rows(p, domain, opts, flux.value, /*neumann=*/true);
  // Pin the boundary mean to zero through a dedicated scalar row.
  Mfs rep = solve_mfs(p, opts);
  // Normalize: subtract the boundary mean exactly.
  HarmonicSolution raw(std::move(rep), 0.0);
  const double bmean = periodic_trapezoid(
                           [&](double s) { return raw.evaluate(domain.point_at(s)); },
                           domain.length(), 1024) /
                       domain.length();
  Mfs shifted = raw.mfs();
  shifted.constant -= bmean;
  HarmonicSolution sol(std::move(shifted), 0.0);
  double residual = 0.0;
  const int M = 401;
  for (int j = 0; j < M; ++j) {
    const double s = (j + 0.29) * domain.length() / M;
    const Vec2 x = domain.point_at(s);
    residual = std::max(
        residual, std::abs(sol.gradient(x).dot(domain.normal_at(s)) - flux.value(s)));
  }
  if (residual > opts.residual_tol * sup_scale(flux, domain.length())) {
    throw SolverError("MFS Neumann residual above tolerance");
  }
  return HarmonicSolution(sol.mfs(), residual);
}

HarmonicSolution solve_mixed_perforated(
    const Domain& domain, const Config& config, double eps, const BoundaryFunc& dirichlet,
    const std::vector<std::function<double(double)>>& core_flux, const SolverOpts& opts) {
  const auto cores = core_geometry(domain, config, eps);
  if (core_flux.size() != cores.size()) {
    throw InvalidArgument("one flux function per core required");
  }

  MfsProblem p;
  p.with_constant = true;
  add_exterior_sources(p, domain, opts);
  for (const auto& core : cores) add_core_sources(p, core, opts);

  // Net flux through each core circle is carried by a fixed central charge.
  for (std::size_t i = 0; i < cores.size(); ++i) {
    const double net =
        periodic_trapezoid(core_flux[i], kTwoPi, 256) * cores[i].eps;  // ds = eps dphi
    const double strength = -net / kTwoPi;  // outward-of-core flux of log is 2*pi
    if (std::abs(strength) > 1e-14) {
      p.fixed_centers.push_back(cores[i].center);
      p.fixed_strengths.push_back(strength);
    }
  }

  add_outer_rows(p, domain, opts, dirichlet.value, /*neumann=*/false);
  for (std::size_t i = 0; i < cores.size(); ++i) {
    add_core_rows(p, cores[i], opts, core_flux[i], /*neumann=*/true);
  }

  Mfs rep = solve_mfs(p, opts);
  HarmonicSolution sol(std::move(rep), 0.0);
  const double residual =
      mfs_validation_residual(sol, domain, &dirichlet, cores, core_flux);
  const double scale = sup_scale(dirichlet, domain.length());
  if (residual > std::max(opts.residual_tol * scale, 1e-8)) {
    throw SolverError("perforated solve residual above tolerance");
  }
  return HarmonicSolution(sol.mfs(), residual);
}

HarmonicSolution solve_p(const Domain& domain, const Config& config, double eps, int i,
                         const SolverOpts& opts) {
  const auto cores = core_geometry(domain, config, eps);
  if (i < 0 || static_cast<std::size_t>(i) >= cores.size()) {
    throw InvalidArgument("core index out of range");
  }
  const Vec2 ai = cores[i].center;

  MfsProblem p;
  p.with_constant = true;
  add_exterior_sources(p, domain, opts);
  for (const auto& core : cores) add_core_sources(p, core, opts);

  // Zero flux on the outer boundary.
  add_outer_rows(p, domain, opts, [](double) { return 0.0; }, /*neumann=*/true);

  // Core i pins the additive constant: p = 0 there. Other cores carry
  // p = -log|x - a_i| up to a free offset.
  int free_offsets = 0;
  for (std::size_t j = 0; j < cores.size(); ++j) {
    if (static_cast<int>(j) == i) {
      add_core_rows(p, cores[j], opts, [](double) { return 0.0; }, /*neumann=*/false);
    } else {
      const CoreGeometry& c = cores[j];
      const int offset_index = free_offsets++;
      add_core_rows(
          p, c, opts,
          [c, ai](double phi) {
            const Vec2 x = c.center + c.eps * Vec2{std::cos(phi), std::sin(phi)};
            return -std::log((x - ai).norm());
          },
          /*neumann=*/false, offset_index);
    }
  }
  p.free_offsets = free_offsets;

  Mfs rep = solve_mfs(p, opts);
  HarmonicSolution sol(std::move(rep), 0.0);

  // Residual: tangential data on the cores, flux on the outer boundary.
  double residual = 0.0;
  for (std::size_t j = 0; j < cores.size(); ++j) {
    const int M = 101;
    // Offsets are free; compare increments along the circle instead of values.
    double base_got = 0.0, base_want = 0.0;
    for (int m = 0; m < M; ++m) {
      const double phi = (m + 0.29) * kTwoPi / M;
      const Vec2 x = cores[j].center + cores[j].eps * Vec2{std::cos(phi), std::sin(phi)};
      const double got = sol.evaluate(x);
      const double want =
          static_cast<int>(j) == i ? 0.0 : -std::log((x - ai).norm());
      if (m == 0) {
        base_got = got;
        base_want = want;
      }
      residual = std::max(residual, std::abs((got - base_got) - (want - base_want)));
    }
  }
  const int M = 301;
  for (int m = 0; m < M; ++m) {
    const double s = (m + 0.29) * domain.length() / M;
    residual = std::max(residual, std::abs(sol.gradient(domain.point_at(s))
                                               .dot(domain.normal_at(s))));
  }
  if (residual > std::max(1e-6, opts.residual_tol)) {
    throw SolverError("conjugate solve residual above tolerance");
  }
  return HarmonicSolution(sol.mfs(), residual);
}

}  // namespace dislocate
