#include "dislocate/dislocate.h"

#include <cstring>
#include <iostream>
#include <string>

#include "core/energy.hpp"
#include "core/optimize.hpp"
#include "core/parallel.hpp"
#include "core/selftest.hpp"

namespace {

thread_local std::string g_last_error;

dislocate_status fail(dislocate_status code, const char* what) {
  g_last_error = what;
  return code;
}

template <typename Fn>
dislocate_status guarded(Fn&& fn) {
  try {
    fn();
    return DISLOCATE_OK;
  } catch (const dislocate::InvalidArgument& e) {
    return fail(DISLOCATE_ERR_INVALID_ARGUMENT, e.what());
  } catch (const dislocate::IoError& e) {
    return fail(DISLOCATE_ERR_IO, e.what());
  } catch (const dislocate::SolverError& e) {
    return fail(DISLOCATE_ERR_SOLVER, e.what());
  } catch (const dislocate::QuadratureError& e) {
    return fail(DISLOCATE_ERR_SOLVER, e.what());
  } catch (const std::exception& e) {
    return fail(DISLOCATE_ERR_INTERNAL, e.what());
  }
}

size_t write_string(const std::string& s, char* buf, size_t size) {
  if (buf != nullptr && size > 0) {
    const size_t n = std::min(size - 1, s.size());
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
  }
  return s.size();
}

}  // namespace

struct dislocate_domain {
  dislocate::Domain impl;
};
struct dislocate_datum {
  dislocate::BoundaryDatum impl;
};
struct dislocate_config {
  dislocate::Config impl;
};
struct dislocate_report {
  dislocate::EnergyReport impl;
};
struct dislocate_result {
  dislocate::OptimizationResult impl;
};
struct dislocate_trace {
  dislocate::CoarsenTrace impl;
};

extern "C" {

const char* dislocate_last_error(void) { return g_last_error.c_str(); }

dislocate_status dislocate_domain_unit_disk(double radius, dislocate_domain** out) {
  if (out == nullptr) return fail(DISLOCATE_ERR_INVALID_ARGUMENT, "null out pointer");
  return guarded([&] { *out = new dislocate_domain{dislocate::Domain::unit_disk(radius)}; });
}

dislocate_status dislocate_domain_load(const char* path, dislocate_domain** out) {
  if (out == nullptr || path == nullptr) {
    return fail(DISLOCATE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] { *out = new dislocate_domain{dislocate::Domain::load(path)}; });
}

void dislocate_domain_free(dislocate_domain* d) { delete d; }

dislocate_status dislocate_boundary_distance(const dislocate_domain* d, double x, double y,
                                             double* out) {
  if (d == nullptr || out == nullptr) {
    return fail(DISLOCATE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] { *out = d->impl.boundary_distance({x, y}); });
}

dislocate_status dislocate_domain_contains(const dislocate_domain* d, double x, double y,
                                           int* out) {
  if (d == nullptr || out == nullptr) {
    return fail(DISLOCATE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] { *out = d->impl.contains({x, y}) ? 1 : 0; });
}

dislocate_status dislocate_datum_preset(const dislocate_domain* d, const char* name,
                                        dislocate_datum** out) {
  if (d == nullptr || name == nullptr || out == nullptr) {
    return fail(DISLOCATE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    const std::string preset(name);
    if (preset == "g1") {
      *out = new dislocate_datum{dislocate::BoundaryDatum::preset_g1(d->impl)};
    } else if (preset == "g2") {
      *out = new dislocate_datum{dislocate::BoundaryDatum::preset_g2(d->impl)};
    } else if (preset.rfind("file:", 0) == 0) {
      *out = new dislocate_datum{
          dislocate::BoundaryDatum::from_file(d->impl, preset.substr(5))};
    } else {
      throw dislocate::InvalidArgument("unknown datum preset: " + preset);
    }
  });
}

dislocate_status dislocate_datum_const(const dislocate_domain* d, int n,
                                       dislocate_datum** out) {
  if (d == nullptr || out == nullptr) {
    return fail(DISLOCATE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    *out = new dislocate_datum{dislocate::BoundaryDatum::preset_const(d->impl, n)};
  });
}

void dislocate_datum_free(dislocate_datum* datum) { delete datum; }

dislocate_status dislocate_datum_total(const dislocate_datum* datum, int* out_n) {
  if (datum == nullptr || out_n == nullptr) {
    return fail(DISLOCATE_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out_n = datum->impl.total();
  return DISLOCATE_OK;
}

dislocate_status dislocate_config_create(const dislocate_domain* d, const double* xy,
                                         size_t count, dislocate_config** out) {
  if (d == nullptr || xy == nullptr || out == nullptr || count == 0) {
    return fail(DISLOCATE_ERR_INVALID_ARGUMENT, "null argument or empty configuration");
  }
  return guarded([&] {
    std::vector<dislocate::Vec2> pts(count);
    for (size_t i = 0; i < count; ++i) pts[i] = {xy[2 * i], xy[2 * i + 1]};
    *out = new dislocate_config{dislocate::Config::from_points(d->impl, pts)};
  });
}

void dislocate_config_free(dislocate_config* c) { delete c; }

dislocate_status dislocate_config_distinct(const dislocate_config* c, size_t* out) {
  if (c == nullptr || out == nullptr) {
    return fail(DISLOCATE_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out = c->impl.distinct();
  return DISLOCATE_OK;
}

dislocate_status dislocate_config_point(const dislocate_config* c, size_t i, double* x,
                                        double* y, int* multiplicity) {
  if (c == nullptr || i >= c->impl.distinct()) {
    return fail(DISLOCATE_ERR_INVALID_ARGUMENT, "bad config index");
  }
  const auto& p = c->impl.points()[i];
  if (x != nullptr) *x = p.position.x;
  if (y != nullptr) *y = p.position.y;
  if (multiplicity != nullptr) *multiplicity = p.multiplicity;
  return DISLOCATE_OK;
}

dislocate_status dislocate_config_radius(const dislocate_config* c, size_t i, double* d_i) {
  if (c == nullptr || d_i == nullptr || i >= c->impl.distinct()) {
    return fail(DISLOCATE_ERR_INVALID_ARGUMENT, "bad config index");
  }
  *d_i = c->impl.radii()[i];
  return DISLOCATE_OK;
}

dislocate_status dislocate_renormalized_energy(const dislocate_domain* d,
                                               const dislocate_datum* datum,
                                               const dislocate_config* c, double rel_tol,
                                               dislocate_report** out) {
  if (d == nullptr || datum == nullptr || c == nullptr || out == nullptr) {
    return fail(DISLOCATE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    dislocate::QuadratureSpec quad;
    if (rel_tol > 0) quad.rel_tol = rel_tol;
    *out = new dislocate_report{
        dislocate::renormalized_energy(d->impl, datum->impl, c->impl, quad)};
  });
}

dislocate_status dislocate_core_energy(const dislocate_domain* d,
                                       const dislocate_datum* datum,
                                       const dislocate_config* c, double eps, double rel_tol,
                                       int relax_guard, dislocate_report** out) {
  if (d == nullptr || datum == nullptr || c == nullptr || out == nullptr) {
    return fail(DISLOCATE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    dislocate::QuadratureSpec quad;
    if (rel_tol > 0) quad.rel_tol = rel_tol;
    *out = new dislocate_report{dislocate::core_energy(d->impl, datum->impl, c->impl, eps,
                                                       quad, relax_guard != 0)};
  });
}

void dislocate_report_free(dislocate_report* r) { delete r; }

int dislocate_report_infinite(const dislocate_report* r) {
  return r != nullptr && r->impl.infinite ? 1 : 0;
}

double dislocate_report_total(const dislocate_report* r) { return r->impl.total; }

dislocate_status dislocate_report_term(const dislocate_report* r, const char* term,
                                       double* out) {
  if (r == nullptr || term == nullptr || out == nullptr) {
    return fail(DISLOCATE_ERR_INVALID_ARGUMENT, "null argument");
  }
  const std::string t(term);
  if (t == "log") {
    *out = r->impl.log_term;
  } else if (t == "regular") {
    *out = r->impl.regular_energy;
  } else if (t == "k_self") {
    *out = r->impl.k_self;
  } else if (t == "cross") {
    *out = r->impl.cross;
  } else if (t == "pair") {
    *out = r->impl.pair;
  } else if (t == "error") {
    *out = r->impl.error_estimate;
  } else {
    return fail(DISLOCATE_ERR_INVALID_ARGUMENT, "unknown term name");
  }
  return DISLOCATE_OK;
}

size_t dislocate_report_csv_row(const dislocate_report* r, char* buf, size_t size) {
  return write_string(r->impl.csv_row(), buf, size);
}

size_t dislocate_report_csv_header(char* buf, size_t size) {
  return write_string(dislocate::EnergyReport::csv_header(), buf, size);
}

dislocate_status dislocate_landscape(const dislocate_domain* d, const dislocate_datum* datum,
                                     int nr, int ntheta, double rel_tol, double* out) {
  if (d == nullptr || datum == nullptr || out == nullptr || nr < 2 || ntheta < 2) {
    return fail(DISLOCATE_ERR_INVALID_ARGUMENT, "bad landscape arguments");
  }
  return guarded([&] {
    if (datum->impl.total() != 1) {
      throw dislocate::InvalidArgument("landscape needs a circulation-one datum");
    }
    dislocate::QuadratureSpec quad;
    if (rel_tol > 0) quad.rel_tol = rel_tol;
    const dislocate::Domain& domain = d->impl;
    const double R = domain.is_disk() ? domain.disk_radius() : 0.5 * domain.diameter();
    dislocate::parallel_for(static_cast<size_t>(nr) * ntheta, [&](size_t cell) {
      const int ir = static_cast<int>(cell) / ntheta;
      const int it = static_cast<int>(cell) % ntheta;
      const double r = (ir + 0.5) * R / nr;
      const double phi = (it + 0.5) * dislocate::kTwoPi / ntheta;
      const dislocate::Vec2 p{r * std::cos(phi), r * std::sin(phi)};
      double value = std::numeric_limits<double>::infinity();
      if (domain.contains(p)) {
        const auto cfg =
            dislocate::Config::from_points(domain, std::vector<dislocate::Vec2>{p});
        value = dislocate::renormalized_energy(domain, datum->impl, cfg, quad).total;
      }
      out[cell] = value;
    });
  });
}

dislocate_status dislocate_ngon_sweep(const dislocate_domain* d,
                                      const dislocate_datum* datum, int n,
                                      const double* radii, size_t nradii, double radius_tol,
                                      double rel_tol, dislocate_result** out) {
  if (d == nullptr || datum == nullptr || out == nullptr) {
    return fail(DISLOCATE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    dislocate::QuadratureSpec quad;
    if (rel_tol > 0) quad.rel_tol = rel_tol;
    std::vector<double> grid;
    if (radii != nullptr && nradii > 0) {
      grid.assign(radii, radii + nradii);
    } else {
      grid = dislocate::default_radius_grid(n);
    }
    *out = new dislocate_result{dislocate::ngon_sweep(
        d->impl, datum->impl, n, grid, radius_tol > 0 ? radius_tol : 1e-4, quad)};
  });
}

dislocate_status dislocate_minimize(const dislocate_domain* d, const dislocate_datum* datum,
                                    int n, int starts, uint64_t seed, double rel_tol,
                                    dislocate_result** out) {
  if (d == nullptr || datum == nullptr || out == nullptr) {
    return fail(DISLOCATE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    dislocate::QuadratureSpec quad;
    if (rel_tol > 0) quad.rel_tol = rel_tol;
    *out = new dislocate_result{
        dislocate::minimize(d->impl, datum->impl, n, starts, seed, quad)};
  });
}

void dislocate_result_free(dislocate_result* r) { delete r; }

double dislocate_result_energy(const dislocate_result* r) { return r->impl.best_energy; }

long dislocate_result_evaluations(const dislocate_result* r) { return r->impl.evaluations; }

int dislocate_result_converged(const dislocate_result* r) {
  return r->impl.converged ? 1 : 0;
}

dislocate_status dislocate_result_points(const dislocate_result* r, double* xy,
                                         size_t capacity, size_t* written) {
  if (r == nullptr || xy == nullptr || written == nullptr) {
    return fail(DISLOCATE_ERR_INVALID_ARGUMENT, "null argument");
  }
  const auto& pts = r->impl.best_config.points();
  size_t w = 0;
  for (const auto& p : pts) {
    for (int m = 0; m < p.multiplicity; ++m) {
      if (w + 1 >= capacity * 2) break;
      xy[w++] = p.position.x;
      xy[w++] = p.position.y;
    }
  }
  *written = w / 2;
  return DISLOCATE_OK;
}

dislocate_status dislocate_coarsen(const dislocate_domain* d, const dislocate_config* c,
                                   double eps, dislocate_trace** out) {
  if (d == nullptr || c == nullptr || out == nullptr) {
    return fail(DISLOCATE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded(
      [&] { *out = new dislocate_trace{dislocate::coarsen(c->impl, eps, d->impl)}; });
}

void dislocate_trace_free(dislocate_trace* t) { delete t; }

size_t dislocate_trace_steps(const dislocate_trace* t) { return t->impl.iterations.size(); }

dislocate_status dislocate_trace_step(const dislocate_trace* t, size_t i, int* action,
                                      double* s_hat, double* eta_after) {
  if (t == nullptr || i >= t->impl.iterations.size()) {
    return fail(DISLOCATE_ERR_INVALID_ARGUMENT, "bad trace index");
  }
  const auto& step = t->impl.iterations[i];
  if (action != nullptr) *action = static_cast<int>(step.action);
  if (s_hat != nullptr) *s_hat = step.s_hat;
  if (eta_after != nullptr) *eta_after = step.eta_after;
  return DISLOCATE_OK;
}

double dislocate_trace_final_eta(const dislocate_trace* t) { return t->impl.final_eta; }

dislocate_status dislocate_trace_final_points(const dislocate_trace* t, double* xy,
                                              int* mult, size_t capacity, size_t* written) {
  if (t == nullptr || xy == nullptr || mult == nullptr || written == nullptr) {
    return fail(DISLOCATE_ERR_INVALID_ARGUMENT, "null argument");
  }
  const auto& pts = t->impl.final_points;
  const size_t n = std::min(capacity, pts.size());
  for (size_t i = 0; i < n; ++i) {
    xy[2 * i] = pts[i].position.x;
    xy[2 * i + 1] = pts[i].position.y;
    mult[i] = pts[i].multiplicity;
  }
  *written = pts.size();
  return DISLOCATE_OK;
}

dislocate_status dislocate_selftest(void) {
  return dislocate::selftest_main(std::cout) == 0 ? DISLOCATE_OK : DISLOCATE_ERR_INTERNAL;
}

}  // extern "C"
