#include "core/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace dislocate {

namespace {

double wrap(double s, double period) {
  double r = std::fmod(s, period);
  if (r < 0) r += period;
  return r;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Domain Domain::unit_disk(double radius, double cone_angle) {
  if (radius <= 0) throw InvalidArgument("disk radius must be positive");
  if (!(cone_angle > 0.5 * kPi && cone_angle < kPi)) {
    throw InvalidArgument("cone angle must lie in (pi/2, pi)");
  }
  Domain d;
  d.kind_ = DomainKind::UnitDisk;
  d.radius_ = radius;
  d.length_ = kTwoPi * radius;
  d.diameter_ = 2.0 * radius;
  d.cone_angle_ = cone_angle;
  // Largest probe radius for which any boundary chord subtends at least the
  // cone angle on a circle.
  d.cone_radius_ = 2.0 * radius * std::cos(0.5 * cone_angle);
  d.centroid_ = {0.0, 0.0};
  d.build_sample_table(2048);
  return d;
}

void Domain::build_sample_table(int n) {
  samples_.resize(n);
  for (int i = 0; i < n; ++i) {
    const double s = length_ * i / n;
    samples_[i].s = s;
    samples_[i].point = point_at(s);
    samples_[i].normal = normal_at(s);
    samples_[i].tangent = tangent_at(s);
  }
}

Domain Domain::from_boundary_samples(const std::vector<std::array<double, 3>>& rows,
                                     double cone_angle, double cone_radius) {
  if (rows.size() < 1024) {
    throw InvalidArgument("boundary sample table needs at least 1024 nodes");
  }
  if (!(cone_angle > 0.5 * kPi && cone_angle < kPi)) {
    throw InvalidArgument("cone angle must lie in (pi/2, pi)");
  }
  Domain d;
  d.kind_ = DomainKind::ParametrizedConvex;
  d.cone_angle_ = cone_angle;
  d.cone_radius_ = cone_radius;

  const std::size_t n = rows.size();
  d.samples_.resize(n);
  if (rows.front()[0] != 0.0) throw InvalidArgument("first sample must have s = 0");
  for (std::size_t i = 0; i < n; ++i) {
    d.samples_[i].s = rows[i][0];
    d.samples_[i].point = {rows[i][1], rows[i][2]};
    if (i > 0 && rows[i][0] <= rows[i - 1][0]) {
      throw InvalidArgument("boundary samples must have strictly increasing s");
    }
  }
  // Closing gap gives the total length.
  const double gap = distance(d.samples_.back().point, d.samples_.front().point);
  d.length_ = d.samples_.back().s + gap;

  // Validate arclength consistency against chord lengths.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double ds = d.samples_[i + 1].s - d.samples_[i].s;
    const double chord = distance(d.samples_[i + 1].point, d.samples_[i].point);
    if (chord > 1.001 * ds + 1e-12) {
      throw InvalidArgument("sample spacing inconsistent with arclength parametrization");
    }
  }

  // Orientation and convexity on the sample polygon.
  double area2 = 0.0;
  Vec2 centroid{0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = d.samples_[i].point;
    const Vec2 b = d.samples_[(i + 1) % n].point;
    area2 += a.cross(b);
    centroid += a;
  }
  if (area2 <= 0.0) throw InvalidArgument("boundary must be counterclockwise");
  d.centroid_ = centroid / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = d.samples_[i].point;
    const Vec2 b = d.samples_[(i + 1) % n].point;
    const Vec2 c = d.samples_[(i + 2) % n].point;
    if ((b - a).cross(c - b) < -1e-9 * d.length_ * d.length_ / n / n) {
      throw InvalidArgument("boundary samples are not convex");
    }
  }

  // Tangents/normals from central differences; also a crude C1 check.
  double diam2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 prev = d.samples_[(i + n - 1) % n].point;
    const Vec2 next = d.samples_[(i + 1) % n].point;
    const Vec2 t = (next - prev).normalized();
    d.samples_[i].tangent = t;
    d.samples_[i].normal = {t.y, -t.x};
    for (std::size_t j = i + 1; j < n; j += n / 64 + 1) {
      diam2 = std::max(diam2, (d.samples_[i].point - d.samples_[j].point).norm2());
    }
  }
  d.diameter_ = std::sqrt(diam2);
  return d;
}

Domain Domain::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open domain file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  const auto kind = kv.find("kind");
  if (kind == kv.end()) throw IoError("domain file misses 'kind'");
  const double cone_angle =
      kv.count("cone_angle") ? std::stod(kv.at("cone_angle")) : 0.75 * kPi;
  if (kind->second == "disk") {
    const double radius = kv.count("radius") ? std::stod(kv.at("radius")) : 1.0;
    return unit_disk(radius, cone_angle);
  }
  if (kind->second == "convex") {
    const auto csv = kv.find("boundary_samples");
    if (csv == kv.end()) throw IoError("convex domain needs 'boundary_samples'");
    std::ifstream table(csv->second);
    if (!table) throw IoError("cannot open boundary sample table: " + csv->second);
    std::string header;
    std::getline(table, header);
    if (trim(header) != "s,x,y") throw IoError("boundary sample CSV must start with 's,x,y'");
    std::vector<std::array<double, 3>> rows;
    while (std::getline(table, line)) {
      if (trim(line).empty()) continue;
      std::array<double, 3> row{};
      std::stringstream ss(line);
      std::string cell;
      for (int c = 0; c < 3; ++c) {
        if (!std::getline(ss, cell, ',')) throw IoError("short row in boundary CSV");
        row[c] = std::stod(cell);
      }
      rows.push_back(row);
    }
    const double cone_radius =
        kv.count("cone_radius") ? std::stod(kv.at("cone_radius")) : 0.0;
    return from_boundary_samples(rows, cone_angle, cone_radius);
  }
  throw IoError("unknown domain kind: " + kind->second);
}

Vec2 Domain::point_at(double s) const {
  if (is_disk()) {
    const double phi = wrap(s, length_) / radius_;
    return {radius_ * std::cos(phi), radius_ * std::sin(phi)};
  }
  // Periodic Catmull-Rom through the sample nodes, indexed by arclength.
  const double sw = wrap(s, length_);
  const std::size_t n = samples_.size();
  // Locate the segment; samples are nearly uniform so guess then fix up.
  std::size_t i = std::min<std::size_t>(
      n - 1, static_cast<std::size_t>(sw / length_ * static_cast<double>(n)));
  auto seg_start = [&](std::size_t k) { return samples_[k].s; };
  auto seg_end = [&](std::size_t k) { return k + 1 < n ? samples_[k + 1].s : length_; };
  while (i > 0 && sw < seg_start(i)) --i;
  while (i + 1 < n && sw >= seg_end(i)) ++i;
  const double h = seg_end(i) - seg_start(i);
  const double t = (sw - seg_start(i)) / h;
  const Vec2 p0 = samples_[(i + n - 1) % n].point;
  const Vec2 p1 = samples_[i].point;
  const Vec2 p2 = samples_[(i + 1) % n].point;
  const Vec2 p3 = samples_[(i + 2) % n].point;
  const double t2 = t * t, t3 = t2 * t;
  return 0.5 * ((2.0 * t3 - 3.0 * t2 + 1.0) * 2.0 * p1 +
                (t3 - 2.0 * t2 + t) * (p2 - p0) +
                (-2.0 * t3 + 3.0 * t2) * 2.0 * p2 + (t3 - t2) * (p3 - p1));
}

Vec2 Domain::tangent_at(double s) const {
  if (is_disk()) {
    const double phi = wrap(s, length_) / radius_;
    return {-std::sin(phi), std::cos(phi)};
  }
  const double h = length_ / static_cast<double>(samples_.size());
  return (point_at(s + 0.5 * h) - point_at(s - 0.5 * h)).normalized();
}

Vec2 Domain::normal_at(double s) const {
  if (is_disk()) {
    const double phi = wrap(s, length_) / radius_;
    return {std::cos(phi), std::sin(phi)};
  }
  const Vec2 t = tangent_at(s);
  return {t.y, -t.x};
}

bool Domain::contains(Vec2 x) const {
  if (is_disk()) return x.norm() < radius_;
  const std::size_t n = samples_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = samples_[i].point;
    const Vec2 b = samples_[(i + 1) % n].point;
    if ((b - a).cross(x - a) <= 0.0) return false;
  }
  return true;
}

double Domain::boundary_distance(Vec2 x) const {
  if (is_disk()) return std::abs(radius_ - x.norm());
  const double s = nearest_boundary_param(x);
  return distance(point_at(s), x);
}

double Domain::nearest_boundary_param(Vec2 x) const {
  if (is_disk()) {
    const double phi = x.norm() == 0.0 ? 0.0 : std::atan2(x.y, x.x);
    return wrap(phi, kTwoPi) * radius_;
  }
  const std::size_t n = samples_.size();
  std::size_t best = 0;
  double best2 = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i < n; ++i) {
    const double d2 = (samples_[i].point - x).norm2();
    if (d2 < best2) {
      best2 = d2;
      best = i;
    }
  }
  // Golden-section refine on the two adjacent segments.
  const double h = length_ / static_cast<double>(n);
  double lo = samples_[best].s - h;
  double hi = samples_[best].s + h;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - gr * (hi - lo);
  double d = lo + gr * (hi - lo);
  double fc = (point_at(c) - x).norm2();
  double fd = (point_at(d) - x).norm2();
  for (int it = 0; it < 48; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = (point_at(c) - x).norm2();
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = (point_at(d) - x).norm2();
    }
  }
  return wrap(0.5 * (lo + hi), length_);
}

Vec2 Domain::project_to_boundary(Vec2 x) const {
  if (is_disk()) {
    const double r = x.norm();
    if (r == 0.0) return {radius_, 0.0};
    return x * (radius_ / r);
  }
  return point_at(nearest_boundary_param(x));
}

double Domain::boundary_param_of(Vec2 x, double tol) const {
  const double s = nearest_boundary_param(x);
  if (distance(point_at(s), x) > tol) {
    throw InvalidArgument("point is not on the boundary");
  }
  return s;
}

double Domain::ray_exit(Vec2 origin, Vec2 dir) const {
  if (is_disk()) {
    // |origin + t dir| = R with |dir| = 1.
    const double b = origin.dot(dir);
    const double c = origin.norm2() - radius_ * radius_;
    const double disc = b * b - c;
    if (disc < 0.0) return 0.0;
    const double t = -b + std::sqrt(disc);
    return std::max(t, 0.0);
  }
  const std::size_t n = samples_.size();
  // Intersect with the sample polygon; convexity gives one forward exit.
  double best = 0.0;
  bool found = false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = samples_[i].point;
    const Vec2 b = samples_[(i + 1) % n].point;
    const Vec2 e = b - a;
    const double denom = dir.cross(e);
    if (std::abs(denom) < 1e-18) continue;
    const Vec2 w = a - origin;
    const double t = w.cross(e) / denom;
    const double u = w.cross(dir) / denom;
    if (t >= 0.0 && u >= -1e-12 && u <= 1.0 + 1e-12) {
      if (!found || t > best) {
        best = t;
        found = true;
      }
    }
  }
  return found ? best : 0.0;
}

bool arc_precedes(const Domain& domain, Vec2 base, Vec2 x, Vec2 y, double tol) {
  const double L = domain.length();
  const double sb = domain.boundary_param_of(base, tol);
  const double sx = domain.boundary_param_of(x, tol);
  const double sy = domain.boundary_param_of(y, tol);
  return wrap(sx - sb, L) <= wrap(sy - sb, L);
}

std::vector<double> separation_radii(const Domain& domain, std::span<const Vec2> points) {
  if (points.empty()) throw InvalidArgument("separation_radii needs at least one point");
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (points[i] == points[j]) {
        throw InvalidArgument("coincident points: fold multiplicities first");
      }
    }
  }
  std::vector<double> d(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double bd = domain.boundary_distance(points[i]);
    if (points.size() == 1) {
      d[i] = bd;
      continue;
    }
    double best = bd;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j == i) continue;
      best = std::min(best, 0.5 * distance(points[i], points[j]));
    }
    d[i] = best;
  }
  return d;
}

Config Config::from_points(const Domain& domain, std::span<const Vec2> raw_points) {
  std::vector<Dislocation> folded;
  for (const Vec2& p : raw_points) {
    bool merged = false;
    for (auto& q : folded) {
      if (q.position == p) {
        ++q.multiplicity;
        merged = true;
        break;
      }
    }
    if (!merged) folded.push_back({p, 1});
  }
  return from_weighted(domain, folded);
}

Config Config::from_weighted(const Domain& domain, std::span<const Dislocation> points) {
  if (points.empty()) throw InvalidArgument("empty configuration");
  Config c;
  for (const auto& p : points) {
    if (p.multiplicity < 1) throw InvalidArgument("multiplicity must be positive");
    c.points_.push_back(p);
    c.n_ += p.multiplicity;
  }
  std::vector<Vec2> distinct;
  distinct.reserve(c.points_.size());
  for (const auto& p : c.points_) distinct.push_back(p.position);
  c.d_ = separation_radii(domain, distinct);
  return c;
}

double Config::min_radius() const {
  double m = std::numeric_limits<double>::max();
  for (double v : d_) m = std::min(m, v);
  return m;
}

bool Config::all_simple_interior(const Domain& domain) const {
  for (const auto& p : points_) {
    if (p.multiplicity != 1) return false;
    if (!domain.contains(p.position)) return false;
  }
  return true;
}

}  // namespace dislocate
