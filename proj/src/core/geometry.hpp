#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace dislocate {

enum class DomainKind { UnitDisk, ParametrizedConvex };

struct BoundarySample {
  double s = 0.0;  // arclength parameter in [0, L)
  Vec2 point;
  Vec2 normal;   // outward unit normal
  Vec2 tangent;  // unit tangent, counterclockwise
};

// A bounded convex planar domain with C1 boundary. Disks are exact; other
// domains are carried as a dense arclength sample table with periodic
// Catmull-Rom interpolation between nodes. Immutable after construction.
class Domain {
 public:
  static Domain unit_disk(double radius = 1.0, double cone_angle = 0.75 * kPi);
  // samples: rows (s, x, y) with s increasing from 0; >= 1024 nodes.
  // Convexity, orientation and smoothness are validated.
  static Domain from_boundary_samples(const std::vector<std::array<double, 3>>& rows,
                                      double cone_angle, double cone_radius);
  // Structured text file with keys: kind, radius | boundary_samples,
  // cone_angle, cone_radius.
  static Domain load(const std::string& path);

  DomainKind kind() const { return kind_; }
  bool is_disk() const { return kind_ == DomainKind::UnitDisk; }
  double disk_radius() const { return radius_; }
  double length() const { return length_; }
  double diameter() const { return diameter_; }
  double cone_angle() const { return cone_angle_; }
  double cone_radius() const { return cone_radius_; }

  Vec2 point_at(double s) const;
  Vec2 normal_at(double s) const;
  Vec2 tangent_at(double s) const;

  bool contains(Vec2 x) const;            // open interior
  double boundary_distance(Vec2 x) const;  // dist(x, boundary), >= 0
  // Arclength of the boundary point nearest to x.
  double nearest_boundary_param(Vec2 x) const;
  Vec2 project_to_boundary(Vec2 x) const;
  // Arclength of a point assumed on the boundary; throws if farther than tol.
  double boundary_param_of(Vec2 x, double tol) const;

  // Distance along the ray origin + t*dir (unit dir) to the boundary exit.
  // origin must lie in the closed domain; returns 0 for outward rays from a
  // boundary point. Unique by convexity.
  double ray_exit(Vec2 origin, Vec2 dir) const;

  const std::vector<BoundarySample>& samples() const { return samples_; }

 private:
  Domain() = default;
  void build_sample_table(int n);

  DomainKind kind_ = DomainKind::UnitDisk;
  double radius_ = 1.0;
  double length_ = kTwoPi;
  double diameter_ = 2.0;
  double cone_angle_ = 0.75 * kPi;
  double cone_radius_ = 0.0;
  std::vector<BoundarySample> samples_;
  Vec2 centroid_;
};

// x precedes y in the counterclockwise arc order started at base b.
// All three points must lie on the boundary (within tol).
bool arc_precedes(const Domain& domain, Vec2 base, Vec2 x, Vec2 y,
                  double tol = 1e-9);

// Separation radii: d_i = min over j != i of min(|a_i-a_j|/2, dist(a_i, bd)).
// A single point gets d_1 = dist(a_1, bd). Coincident inputs are an error;
// fold them into multiplicities first.
std::vector<double> separation_radii(const Domain& domain, std::span<const Vec2> points);

struct Dislocation {
  Vec2 position;
  int multiplicity = 1;
};

// A dislocation configuration: distinct positions with multiplicities and
// the derived separation radii. Immutable after construction.
class Config {
 public:
  // Folds exactly coincident raw points into multiplicities.
  static Config from_points(const Domain& domain, std::span<const Vec2> raw_points);
  static Config from_weighted(const Domain& domain, std::span<const Dislocation> points);

  const std::vector<Dislocation>& points() const { return points_; }
  int total() const { return n_; }                  // n = sum of multiplicities
  std::size_t distinct() const { return points_.size(); }
  const std::vector<double>& radii() const { return d_; }
  double min_radius() const;
  bool all_simple_interior(const Domain& domain) const;

 private:
  std::vector<Dislocation> points_;
  int n_ = 0;
  std::vector<double> d_;
};

}  // namespace dislocate
