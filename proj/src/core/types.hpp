#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace dislocate {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double xx, double yy) : x(xx), y(yy) {}

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double c) const { return {x * c, y * c}; }
  Vec2 operator/(double c) const { return {x / c, y / c}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  bool operator==(const Vec2&) const = default;

  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  // z-component of the 2D cross product
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
  Vec2 perp() const { return {-y, x}; }
  Vec2 normalized() const {
    const double n = norm();
    return {x / n, y / n};
  }
  double angle() const { return std::atan2(y, x); }
};

inline Vec2 operator*(double c, Vec2 v) { return v * c; }

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

struct Disk {
  Vec2 center;
  double radius = 0.0;
};

// Controls the adaptive quadrature used by the field/energy integrals.
struct QuadratureSpec {
  double rel_tol = 1e-6;
  int max_depth = 14;
  // Polar patch radius around a singular point, as a fraction of the
  // smaller of the separation radius and 0.1*diam.
  double patch_scale = 0.5;
  // When true, energy assembly also evaluates the cross and pair terms by
  // 2D quadrature and folds the discrepancy into the error estimate.
  bool cross_check = false;
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(what) {}
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what) : Error(what) {}
};

class QuadratureError : public Error {
 public:
  explicit QuadratureError(const std::string& what) : Error(what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace dislocate
