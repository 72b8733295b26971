#include "core/quad.hpp"

#include <algorithm>
#include <cmath>

namespace dislocate {

namespace {

// Abscissae/weights for 16-point Gauss-Legendre on [-1, 1].
constexpr double kGx[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                           0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                           0.9445750230732326, 0.9894009349916499};
constexpr double kGw[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                           0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                           0.0622535239386479, 0.0271524594117541};

struct SimpsonState {
  const Fn1* f;
  double rel_tol;
  int max_depth;
  bool converged = true;
};

double simpson(double fa, double fm, double fb, double a, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(SimpsonState& st, double a, double b, double fa, double fm,
                     double fb, double whole, double scale, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = (*st.f)(lm);
  const double frm = (*st.f)(rm);
  const double left = simpson(fa, flm, fm, a, m);
  const double right = simpson(fm, frm, fb, m, b);
  const double err = left + right - whole;
  if (std::abs(err) <= 15.0 * st.rel_tol * (scale + std::abs(left + right)) ||
      depth >= st.max_depth) {
    if (depth >= st.max_depth &&
        std::abs(err) > 15.0 * st.rel_tol * (scale + std::abs(left + right))) {
      st.converged = false;
    }
    return left + right + err / 15.0;
  }
  return adaptive_step(st, a, m, fa, flm, fm, left, scale, depth + 1) +
         adaptive_step(st, m, b, fm, frm, fb, right, scale, depth + 1);
}

}  // namespace

double gauss16(const Fn1& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < 8; ++i) {
    sum += kGw[i] * (f(c + h * kGx[i]) + f(c - h * kGx[i]));
  }
  return sum * h;
}

double adaptive_1d(const Fn1& f, double a, double b, double rel_tol, int max_depth) {
  if (a == b) return 0.0;
  SimpsonState st{&f, rel_tol, max_depth};
  const double fa = f(a);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = simpson(fa, fm, fb, a, b);
  // Scale guards against spurious convergence on near-zero integrals.
  const double scale = 1e-30 + std::abs(whole);
  const double result = adaptive_step(st, a, b, fa, fm, fb, whole, scale, 0);
  if (!st.converged) {
    throw QuadratureError("adaptive quadrature did not converge to the requested tolerance");
  }
  return result;
}

double adaptive_1d_pieces(const Fn1& f, double a, double b,
                          const std::vector<double>& breakpoints, double rel_tol,
                          int max_depth) {
  std::vector<double> cuts;
  cuts.push_back(a);
  for (double c : breakpoints) {
    if (c > a && c < b) cuts.push_back(c);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) {
      // Inset the endpoints: integrands may take one-sided values exactly at
      // a kink, which would stall the subdivision.
      const double delta = 1e-13 * (b - a);
      const double lo = cuts[i] + delta;
      const double hi = cuts[i + 1] - delta;
      if (hi > lo) total += adaptive_1d(f, lo, hi, rel_tol, max_depth);
    }
  }
  return total;
}

double periodic_trapezoid(const Fn1& f, double period, int n) {
  const double h = period / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += f((i + 0.5) * h);
  return sum * h;
}

double graded_radial(const Fn1& f, double a, double b, int panels_per_decade) {
  if (b <= a) return 0.0;
  if (a <= 0.0) throw InvalidArgument("graded_radial requires a > 0");
  const double decades = std::log10(b / a);
  const int panels = std::max(1, static_cast<int>(std::ceil(decades * panels_per_decade)));
  const double ratio = std::pow(b / a, 1.0 / panels);
  double sum = 0.0;
  double lo = a;
  for (int i = 0; i < panels; ++i) {
    const double hi = (i + 1 == panels) ? b : lo * ratio;
    sum += gauss16(f, lo, hi);
    lo = hi;
  }
  return sum;
}

}  // namespace dislocate
