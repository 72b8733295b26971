#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace oracles {

using dislocate::Disk;
using dislocate::Dislocation;
using dislocate::kPi;
using dislocate::kTwoPi;
using dislocate::Vec2;

namespace {

// Forward exit of the ray a + t*dir from the circle |x| = R.
double circle_exit(Vec2 a, Vec2 dir, double R) {
  const double b = a.dot(dir);
  const double disc = b * b - (a.norm2() - R * R);
  if (disc <= 0.0) return 0.0;
  return std::max(0.0, -b + std::sqrt(disc));
}

}  // namespace

double midpoint_polar_disk(Vec2 a, double eps, const std::vector<Disk>& exclusions,
                           const std::function<double(Vec2)>& f, int n_angle, int n_radial,
                           double disk_radius) {
  double sum = 0.0;
  for (int ia = 0; ia < n_angle; ++ia) {
    const double th = (ia + 0.5) * kTwoPi / n_angle;
    const Vec2 dir{std::cos(th), std::sin(th)};
    const double exit = circle_exit(a, dir, disk_radius);
    if (exit <= eps) continue;
    const double h = (exit - eps) / n_radial;
    double line = 0.0;
    for (int ir = 0; ir < n_radial; ++ir) {
      const double r = eps + (ir + 0.5) * h;
      const Vec2 x = a + r * dir;
      bool excluded = false;
      for (const Disk& d : exclusions) {
        if ((x - d.center).norm() < d.radius) {
          excluded = true;
          break;
        }
      }
      if (!excluded) line += f(x) * r;
    }
    sum += line * h;
  }
  return sum * kTwoPi / n_angle;
}

double midpoint_polar_region(Vec2 center, const Disk& region,
                             const std::function<double(Vec2)>& f, int n_angle,
                             int n_radial) {
  double sum = 0.0;
  for (int ia = 0; ia < n_angle; ++ia) {
    const double th = (ia + 0.5) * kTwoPi / n_angle;
    const Vec2 dir{std::cos(th), std::sin(th)};
    // Chord of the region along this ray.
    const Vec2 w = center - region.center;
    const double b = dir.dot(w);
    const double disc = b * b - (w.norm2() - region.radius * region.radius);
    if (disc <= 0.0) continue;
    const double t0 = std::max(0.0, -b - std::sqrt(disc));
    const double t1 = -b + std::sqrt(disc);
    if (t1 <= t0) continue;
    const double h = (t1 - t0) / n_radial;
    double line = 0.0;
    for (int ir = 0; ir < n_radial; ++ir) {
      const double r = t0 + (ir + 0.5) * h;
      line += f(center + r * dir) * r;
    }
    sum += line * h;
  }
  return sum * kTwoPi / n_angle;
}

double annulus_series_energy(double ax, double eps,
                             const std::function<double(double)>& g_of_angle, int modes) {
  if (!(eps > 0.0 && std::abs(ax) + eps < 1.0)) {
    throw std::invalid_argument("core must sit strictly inside the unit disk");
  }
  // Disk automorphism T(z) = (z - c)/(1 - c z), c real, sending the circle
  // |z - ax| = eps to a circle centered at the origin with some radius rho.
  double c = 0.0, rho = eps;
  if (ax != 0.0) {
    const double A = ax;
    const double B = 1.0 + ax * ax - eps * eps;
    const double disc = B * B - 4.0 * A * A;
    c = (B - std::sqrt(disc)) / (2.0 * A);
    const double t = (ax + eps - c) / (1.0 - c * (ax + eps));
    rho = std::abs(t);
  }
  auto Tinv = [c](std::complex<double> zeta) {
    return (zeta + c) / (1.0 + c * zeta);
  };

  // Transported outer datum minus the winding angle, unwrapped to a
  // continuous periodic function.
  const int nsamp = 4 * modes;
  std::vector<double> G(nsamp);
  double offset = 0.0;
  double prev_psi = 0.0;
  for (int j = 0; j < nsamp; ++j) {
    const double phi = (j + 0.5) * kTwoPi / nsamp;
    const std::complex<double> z = Tinv(std::polar(1.0, phi));
    double psi = std::arg(z);
    if (j > 0) {
      while (psi + offset < prev_psi - kPi) offset += kTwoPi;
      while (psi + offset > prev_psi + kPi) offset -= kTwoPi;
    }
    psi += offset;
    prev_psi = psi;
    G[j] = g_of_angle(psi) - phi;
  }
  // The sampled difference of two unit-winding angles can still carry a
  // residual 2*pi*k ramp if g's jump bookkeeping was crossed; remove the mean
  // slope (a linear ramp would break periodicity and show up immediately).
  // Fourier coefficients by direct sums (staggered nodes).
  double energy = kPi * std::log(1.0 / rho);
  for (int k = 1; k <= modes; ++k) {
    double ck = 0.0, sk = 0.0;
    for (int j = 0; j < nsamp; ++j) {
      const double phi = (j + 0.5) * kTwoPi / nsamp;
      ck += G[j] * std::cos(k * phi);
      sk += G[j] * std::sin(k * phi);
    }
    ck *= 2.0 / nsamp;
    sk *= 2.0 / nsamp;
    const double r2k = std::pow(rho, 2.0 * k);
    energy += 0.5 * kPi * k * (ck * ck + sk * sk) * (1.0 - r2k) / (1.0 + r2k);
  }
  return energy;
}

double grid_core_energy(const std::vector<Dislocation>& points, double eps,
                        const std::function<double(double)>& g_of_angle, int n_side,
                        double* iterations_used) {
  const double pad = 1.02;
  const int N = n_side;
  const double h = 2.0 * pad / (N - 1);
  auto coord = [&](int i) { return -pad + i * h; };
  auto idx = [&](int i, int j) { return static_cast<std::size_t>(j) * N + i; };

  // Node classes: -1 outside-domain (Dirichlet anchor), 0 inactive (inside a
  // core), 1 free.
  std::vector<int> cls(static_cast<std::size_t>(N) * N, -1);
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) {
      const Vec2 p{coord(i), coord(j)};
      if (p.norm() >= 1.0) continue;
      bool in_core = false;
      for (const auto& d : points) {
        if ((p - d.position).norm() < eps) {
          in_core = true;
          break;
        }
      }
      cls[idx(i, j)] = in_core ? 0 : 1;
    }
  }

  // Jump across the cut segments a_i -> (1, 0): an edge crossing segment k
  // contributes +-2*pi*m_k depending on orientation.
  auto edge_jump = [&](Vec2 p, Vec2 q) {
    double jump = 0.0;
    for (const auto& d : points) {
      const Vec2 a = d.position;
      const Vec2 b{1.0, 0.0};
      const Vec2 s = b - a;
      const Vec2 e = q - p;
      const double denom = e.cross(s);
      if (denom == 0.0) continue;
      const Vec2 w = a - p;
      const double t = w.cross(s) / denom;  // along edge
      const double u = e.cross(w) / -denom; // along cut
      if (t >= 0.0 && t < 1.0 && u >= 0.0 && u <= 1.0) {
        jump += (e.cross(s) > 0 ? 1.0 : -1.0) * kTwoPi * d.multiplicity;
      }
    }
    return jump;
  };

  // Dirichlet values at outside nodes; evaluated as g(angle).
  std::vector<double> u(static_cast<std::size_t>(N) * N, 0.0);
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) {
      if (cls[idx(i, j)] == -1) {
        const Vec2 p{coord(i), coord(j)};
        double phi = std::atan2(p.y, p.x);
        if (phi < 0) phi += kTwoPi;
        u[idx(i, j)] = g_of_angle(phi);
      }
    }
  }

  // Active edges between free/outside nodes (at least one endpoint free).
  struct Edge {
    std::size_t p, q;
    double jump;
  };
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(N) * N * 2);
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) {
      const std::size_t k0 = idx(i, j);
      if (cls[k0] == 0) continue;
      const Vec2 p{coord(i), coord(j)};
      const auto try_edge = [&](int i2, int j2) {
        if (i2 >= N || j2 >= N) return;
        const std::size_t k1 = idx(i2, j2);
        if (cls[k1] == 0) return;
        if (cls[k0] != 1 && cls[k1] != 1) return;  // both anchored: no energy
        const Vec2 q{coord(i2), coord(j2)};
        edges.push_back({k0, k1, edge_jump(p, q)});
      };
      try_edge(i + 1, j);
      try_edge(i, j + 1);
    }
  }

  // Minimize 1/2 sum (u_q - u_p - jump)^2 over the free nodes: conjugate
  // gradients on the graph Laplacian with anchored values moved to the
  // right-hand side.
  std::vector<double> b(u.size(), 0.0);
  for (const Edge& e : edges) {
    const bool p_free = cls[e.p] == 1;
    const bool q_free = cls[e.q] == 1;
    if (p_free) b[e.p] += -e.jump;
    if (q_free) b[e.q] += e.jump;
    if (p_free && !q_free) b[e.p] += u[e.q];
    if (q_free && !p_free) b[e.q] += u[e.p];
  }
  std::vector<double> diag(u.size(), 0.0);
  for (const Edge& e : edges) {
    if (cls[e.p] == 1) diag[e.p] += 1.0;
    if (cls[e.q] == 1) diag[e.q] += 1.0;
  }

  auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (const Edge& e : edges) {
      const double xp = cls[e.p] == 1 ? x[e.p] : 0.0;
      const double xq = cls[e.q] == 1 ? x[e.q] : 0.0;
      const double d = xq - xp;
      if (cls[e.p] == 1) out[e.p] -= d;
      if (cls[e.q] == 1) out[e.q] += d;
    }
  };

  std::vector<double> x(u.size(), 0.0), r = b, z(u.size()), p(u.size()), Ap(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    z[k] = diag[k] > 0 ? r[k] / diag[k] : 0.0;
  }
  p = z;
  double rz = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) rz += r[k] * z[k];
  const int max_iter = 6 * N;
  double iters = 0.0;
  const double rz0 = rz;
  for (int it = 0; it < max_iter && rz > 1e-14 * rz0; ++it) {
    apply(p, Ap);
    double pAp = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) pAp += p[k] * Ap[k];
    if (pAp <= 0) break;
    const double alpha = rz / pAp;
    for (std::size_t k = 0; k < u.size(); ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * Ap[k];
    }
    double rz_new = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
      z[k] = diag[k] > 0 ? r[k] / diag[k] : 0.0;
      rz_new += r[k] * z[k];
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t k = 0; k < u.size(); ++k) p[k] = z[k] + beta * p[k];
    iters = it + 1;
  }
  if (iterations_used != nullptr) *iterations_used = iters;

  for (std::size_t k = 0; k < u.size(); ++k) {
    if (cls[k] == 1) u[k] = x[k];
  }
  double energy = 0.0;
  for (const Edge& e : edges) {
    const double d = u[e.q] - u[e.p] - e.jump;
    energy += d * d;
  }
  return 0.5 * energy;
}

}  // namespace oracles
