#include "core/datum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/quad.hpp"

namespace dislocate {

namespace {

double wrap(double s, double period) {
  double r = std::fmod(s, period);
  if (r < 0) r += period;
  return r;
}

// arc of s relative to base, in [0, L)
double arc_from(double s, double base, double length) { return wrap(s - base, length); }

}  // namespace

BoundaryDatum BoundaryDatum::make(const Domain& domain, Fn f, Fn f_antiderivative,
                                  double base_param, std::vector<DatumJump> jumps,
                                  std::vector<double> f_kink_params, double circulation_tol) {
  BoundaryDatum d;
  d.domain_ = &domain;
  d.f_ = std::move(f);
  d.antiderivative_ = std::move(f_antiderivative);
  d.base_ = wrap(base_param, domain.length());
  d.length_ = domain.length();
  d.jumps_ = std::move(jumps);
  d.f_kinks_ = std::move(f_kink_params);

  std::sort(d.jumps_.begin(), d.jumps_.end(),
            [](const DatumJump& a, const DatumJump& b) { return a.arc < b.arc; });
  int n = 0;
  for (std::size_t i = 0; i < d.jumps_.size(); ++i) {
    const auto& j = d.jumps_[i];
    if (!(j.arc > 0.0 && j.arc <= d.length_)) {
      throw InvalidArgument("jump points must be distinct from the base point");
    }
    if (i > 0 && d.jumps_[i].arc == d.jumps_[i - 1].arc) {
      throw InvalidArgument("duplicate jump points; fold their multiplicities");
    }
    if (j.multiplicity < 1) throw InvalidArgument("jump multiplicity must be positive");
    n += j.multiplicity;
  }
  if (n == 0) throw InvalidArgument("datum needs at least one jump");
  d.n_ = n;

  const double circulation = d.antiderivative_(d.length_);
  if (std::abs(circulation - kTwoPi * n) > circulation_tol * std::max(1.0, kTwoPi * n)) {
    throw InvalidArgument("strain circulation does not match 2*pi*n");
  }
  return d;
}

BoundaryDatum BoundaryDatum::from_function(const Domain& domain, Fn f, Vec2 base,
                                           const std::vector<std::pair<Vec2, int>>& jumps,
                                           double circulation_tol) {
  const double L = domain.length();
  const double base_s = domain.boundary_param_of(base, 1e-6 * L);

  // Tabulated antiderivative of f over the arc from the base.
  const int panels = 1 << 12;
  auto table = std::make_shared<std::vector<double>>(panels + 1, 0.0);
  auto fb = [f, base_s, L](double arc) { return f(wrap(base_s + arc, L)); };
  for (int i = 0; i < panels; ++i) {
    const double a = L * i / panels;
    const double b = L * (i + 1) / panels;
    (*table)[i + 1] = (*table)[i] + gauss16(fb, a, b);
  }
  auto antiderivative = [table, panels, L](double arc) {
    const double u = std::clamp(arc / L, 0.0, 1.0) * panels;
    const int i = std::min(panels - 1, static_cast<int>(u));
    const double frac = u - i;
    // Linear blend between panel ends; dense enough for the 1e-9 budget.
    return (*table)[i] * (1.0 - frac) + (*table)[i + 1] * frac;
  };

  std::vector<DatumJump> arc_jumps;
  for (const auto& [p, m] : jumps) {
    const double arc = arc_from(domain.boundary_param_of(p, 1e-6 * L), base_s, L);
    if (arc == 0.0) throw InvalidArgument("jump point coincides with the base point");
    arc_jumps.push_back({arc, m});
  }
  return make(domain, std::move(f), antiderivative, base_s, std::move(arc_jumps), {},
              circulation_tol);
}

BoundaryDatum BoundaryDatum::preset_g1(const Domain& domain) { return preset_const(domain, 1); }

BoundaryDatum BoundaryDatum::preset_const(const Domain& domain, int n) {
  if (n < 1) throw InvalidArgument("preset needs n >= 1");
  const double L = domain.length();
  const double c = kTwoPi * n / L;
  auto d = make(
      domain, [c](double) { return c; }, [c](double arc) { return c * arc; }, 0.0,
      {{L, n}}, {});
  d.rotation_invariant_ = domain.is_disk();
  return d;
}

BoundaryDatum BoundaryDatum::preset_g2(const Domain& domain) {
  if (!domain.is_disk()) throw InvalidArgument("the g2 preset lives on the disk");
  const double R = domain.disk_radius();
  const double L = domain.length();
  // Strain 2 on the right half circle, 0 on the left; circulation 2*pi.
  auto f = [R, L](double s) {
    const double phi = wrap(s, L) / R;
    return (phi < 0.5 * kPi || phi > 1.5 * kPi) ? 2.0 / R : 0.0;
  };
  auto F = [R](double arc) {
    const double phi = arc / R;
    if (phi <= 0.5 * kPi) return 2.0 * phi;
    if (phi <= 1.5 * kPi) return kPi;
    return kPi + 2.0 * (phi - 1.5 * kPi);
  };
  return make(domain, f, F, 0.0, {{L, 1}}, {0.25 * L, 0.75 * L});
}

BoundaryDatum BoundaryDatum::from_file(const Domain& domain, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open datum file: " + path);
  std::string line;
  std::getline(in, line);
  if (line != "s,f" && line != "s,f\r") throw IoError("datum CSV must start with 's,f'");
  auto nodes = std::make_shared<std::vector<std::pair<double, double>>>();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',')) {
      throw IoError("short row in datum CSV");
    }
    nodes->emplace_back(std::stod(a), std::stod(b));
  }
  if (nodes->size() < 2) throw IoError("datum CSV needs at least two samples");
  const double L = domain.length();
  auto f = [nodes, L](double s) {
    const auto& v = *nodes;
    const double sw = wrap(s, L);
    auto it = std::upper_bound(v.begin(), v.end(), sw,
                               [](double x, const auto& p) { return x < p.first; });
    const std::size_t hi = it == v.end() ? 0 : static_cast<std::size_t>(it - v.begin());
    const std::size_t lo = hi == 0 ? v.size() - 1 : hi - 1;
    const double span = wrap(v[hi].first - v[lo].first, L);
    const double t = span == 0.0 ? 0.0 : wrap(sw - v[lo].first, L) / span;
    return v[lo].second * (1.0 - t) + v[hi].second * t;
  };
  std::vector<double> cum((1 << 12) + 1, 0.0);
  const int panels = 1 << 12;
  for (int i = 0; i < panels; ++i) {
    cum[i + 1] = cum[i] + gauss16(f, L * i / panels, L * (i + 1) / panels);
  }
  const int n = static_cast<int>(std::lround(cum[panels] / kTwoPi));
  if (n < 1 || std::abs(cum[panels] - kTwoPi * n) > 1e-5 * std::max(1.0, kTwoPi * n)) {
    throw InvalidArgument("file datum circulation is not a positive multiple of 2*pi");
  }
  auto antiderivative = [cum = std::move(cum), panels, L](double arc) {
    const double u = std::clamp(arc / L, 0.0, 1.0) * panels;
    const int i = std::min(panels - 1, static_cast<int>(u));
    const double frac = u - i;
    return cum[i] * (1.0 - frac) + cum[i + 1] * frac;
  };
  // Base at s = 0; the whole circulation jumps at the wrap point.
  return make(domain, f, antiderivative, 0.0, {{L, n}}, {}, 1e-4);
}

double BoundaryDatum::f(double s) const { return f_(s); }

double BoundaryDatum::integral_from_base(double s) const {
  return antiderivative_(arc_from(s, base_, length_));
}

double BoundaryDatum::g(double s) const {
  const double arc = arc_from(s, base_, length_);
  double v = antiderivative_(arc);
  for (const auto& j : jumps_) {
    if (j.arc < length_ && arc > j.arc) v -= kTwoPi * j.multiplicity;
  }
  return v;
}

double BoundaryDatum::g_single(double s, std::size_t jump_index) const {
  const double arc = arc_from(s, base_, length_);
  double v = antiderivative_(arc) / n_;
  const auto& j = jumps_.at(jump_index);
  if (j.arc < length_ && arc > j.arc) v -= kTwoPi;
  return v;
}

double BoundaryDatum::total_variation() const {
  return adaptive_1d_pieces([this](double s) { return std::abs(f_(s)); }, 0.0, length_,
                            kink_params(), 1e-10, 20);
}

std::vector<double> BoundaryDatum::kink_params() const {
  std::vector<double> out;
  for (const auto& j : jumps_) out.push_back(wrap(base_ + j.arc, length_));
  for (double a : f_kinks_) out.push_back(wrap(base_ + a, length_));
  out.push_back(base_);
  std::sort(out.begin(), out.end());
  return out;
}

BoundaryDatum build_primitive(const Domain& domain, BoundaryDatum::Fn f, Vec2 base,
                              const std::vector<std::pair<Vec2, int>>& jumps,
                              double circulation_tol) {
  return BoundaryDatum::from_function(domain, std::move(f), base, jumps, circulation_tol);
}

std::vector<BranchCut> assign_cuts(const Domain& domain, const BoundaryDatum& datum,
                                   const Config& config) {
  const auto& jumps = datum.jumps();
  const auto& pts = config.points();

  auto jump_point = [&](const DatumJump& j) {
    return domain.point_at(datum.base_param() + j.arc);
  };
  auto cut_for = [&](const Dislocation& p, Vec2 target) {
    if (!domain.contains(p.position)) {
      // Boundary dislocation: cut along the outward normal.
      const double s = domain.nearest_boundary_param(p.position);
      return BranchCut{p.position, domain.normal_at(s)};
    }
    return BranchCut::through(p.position, target);
  };

  std::vector<BranchCut> cuts;
  if (jumps.size() == 1) {
    if (jumps[0].multiplicity != config.total()) {
      throw InvalidArgument("jump multiplicity does not cover the configuration");
    }
    const Vec2 target = jump_point(jumps[0]);
    for (const auto& p : pts) cuts.push_back(cut_for(p, target));
    return cuts;
  }
  if (jumps.size() == pts.size()) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (jumps[i].multiplicity != pts[i].multiplicity) {
        throw InvalidArgument("jump multiplicities do not match the configuration");
      }
      cuts.push_back(cut_for(pts[i], jump_point(jumps[i])));
    }
    return cuts;
  }
  throw InvalidArgument("cannot pair datum jumps with dislocations");
}

CompositeDatum composite_dirichlet(const Domain& domain, const BoundaryDatum& datum,
                                   const Config& config, int which) {
  const auto cuts = assign_cuts(domain, datum, config);
  const auto& pts = config.points();
  const Domain* dom = &domain;
  auto dat = std::make_shared<BoundaryDatum>(datum);

  CompositeDatum out;
  if (which < 0) {
    struct Term {
      BranchCut cut;
      double weight;
    };
    auto terms = std::make_shared<std::vector<Term>>();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double omega = domain.contains(pts[i].position) ? 1.0 : 2.0;
      terms->push_back({cuts[i], omega * pts[i].multiplicity});
    }
    out.value = [dom, dat, terms](double s) {
      double v = dat->g(s);
      const Vec2 x = dom->point_at(s);
      for (const auto& t : *terms) v -= t.weight * theta_branch_onesided(t.cut, x);
      return v;
    };
  } else {
    const std::size_t i = static_cast<std::size_t>(which);
    if (i >= pts.size()) throw InvalidArgument("dislocation index out of range");
    const std::size_t jump_index = datum.jumps().size() == 1 ? 0 : i;
    const double omega = domain.contains(pts[i].position) ? 1.0 : 2.0;
    const BranchCut cut = cuts[i];
    out.value = [dom, dat, cut, omega, jump_index](double s) {
      return dat->g_single(s, jump_index) - omega * theta_branch_onesided(cut, dom->point_at(s));
    };
  }

  out.kinks = datum.kink_params();
  // The angle traces are continuous except across their cuts, which sit at
  // jump points of g; verify the cancellation before solving.
  const double L = domain.length();
  const double delta = 1e-9 * L;
  for (double s : out.kinks) {
    const double gap = out.value(s + delta) - out.value(s - delta);
    if (std::abs(gap) > 1e-6) {
      throw InvalidArgument("composite boundary datum is discontinuous at a jump point");
    }
  }
  double sup = 0.0;
  for (int i = 0; i < 512; ++i) {
    sup = std::max(sup, std::abs(out.value((i + 0.37) * L / 512)));
  }
  out.sup = sup;
  return out;
}

}  // namespace dislocate
