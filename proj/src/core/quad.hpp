#pragma once

#include <functional>
#include <vector>

#include "core/types.hpp"

namespace dislocate {

using Fn1 = std::function<double(double)>;

// 16-point Gauss-Legendre on [a, b].
double gauss16(const Fn1& f, double a, double b);

// Adaptive Simpson with absolute/relative error control. Throws
// QuadratureError if the tolerance cannot be met within max_depth.
double adaptive_1d(const Fn1& f, double a, double b, double rel_tol, int max_depth);

// Same, but splits at the given interior breakpoints first (for piecewise
// smooth integrands with known kinks).
double adaptive_1d_pieces(const Fn1& f, double a, double b,
                          const std::vector<double>& breakpoints, double rel_tol,
                          int max_depth);

// Trapezoid rule for a smooth periodic integrand over one full period
// [0, period); spectrally accurate.
double periodic_trapezoid(const Fn1& f, double period, int n);

// Gauss integration of f(r) over [a, b] with subintervals graded
// geometrically toward a; intended for integrands that vary on the scale of
// the distance to a singular point at r <= a.
double graded_radial(const Fn1& f, double a, double b, int panels_per_decade = 2);

}  // namespace dislocate
