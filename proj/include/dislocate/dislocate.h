/* dislocate: renormalized-energy computations for screw dislocation
 * configurations in a bounded convex planar domain.
 *
 * C API of the shared library. All objects are opaque handles created and
 * destroyed through these functions; every fallible call returns a
 * dislocate_status and writes results through out-parameters. Handles are
 * immutable after creation and may be shared across threads.
 */
#ifndef DISLOCATE_H
#define DISLOCATE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dislocate_status {
  DISLOCATE_OK = 0,
  DISLOCATE_ERR_INVALID_ARGUMENT = 1,
  DISLOCATE_ERR_IO = 2,
  DISLOCATE_ERR_SOLVER = 3,
  DISLOCATE_ERR_INTERNAL = 4
} dislocate_status;

/* Message for the most recent failure on this thread. */
const char* dislocate_last_error(void);

/* ---------- domains ---------- */

typedef struct dislocate_domain dislocate_domain;

dislocate_status dislocate_domain_unit_disk(double radius, dislocate_domain** out);
/* Structured text file: keys kind (disk|convex), radius | boundary_samples
 * (CSV path with header s,x,y), cone_angle, cone_radius. */
dislocate_status dislocate_domain_load(const char* path, dislocate_domain** out);
void dislocate_domain_free(dislocate_domain* d);

dislocate_status dislocate_boundary_distance(const dislocate_domain* d, double x, double y,
                                             double* out);
dislocate_status dislocate_domain_contains(const dislocate_domain* d, double x, double y,
                                           int* out);

/* ---------- boundary data ---------- */

typedef struct dislocate_datum dislocate_datum;

/* name: "g1", "g2", or "file:<path>" (CSV with header s,f). */
dislocate_status dislocate_datum_preset(const dislocate_domain* d, const char* name,
                                        dislocate_datum** out);
/* Uniform strain with circulation 2*pi*n. */
dislocate_status dislocate_datum_const(const dislocate_domain* d, int n,
                                       dislocate_datum** out);
void dislocate_datum_free(dislocate_datum* datum);
dislocate_status dislocate_datum_total(const dislocate_datum* datum, int* out_n);

/* ---------- configurations ---------- */

typedef struct dislocate_config dislocate_config;

/* xy: count pairs (x0, y0, x1, y1, ...). Coincident points fold into
 * multiplicities. */
dislocate_status dislocate_config_create(const dislocate_domain* d, const double* xy,
                                         size_t count, dislocate_config** out);
void dislocate_config_free(dislocate_config* c);
dislocate_status dislocate_config_distinct(const dislocate_config* c, size_t* out);
dislocate_status dislocate_config_point(const dislocate_config* c, size_t i, double* x,
                                        double* y, int* multiplicity);
dislocate_status dislocate_config_radius(const dislocate_config* c, size_t i, double* d_i);

/* ---------- energies ---------- */

typedef struct dislocate_report dislocate_report;

/* Limit functional; infinite configurations yield a report with
 * dislocate_report_infinite() != 0 rather than an error. */
dislocate_status dislocate_renormalized_energy(const dislocate_domain* d,
                                               const dislocate_datum* datum,
                                               const dislocate_config* c, double rel_tol,
                                               dislocate_report** out);
/* Core-radius energy; relax_guard lifts the eps < min_d/2 guard. */
dislocate_status dislocate_core_energy(const dislocate_domain* d,
                                       const dislocate_datum* datum,
                                       const dislocate_config* c, double eps, double rel_tol,
                                       int relax_guard, dislocate_report** out);
void dislocate_report_free(dislocate_report* r);

int dislocate_report_infinite(const dislocate_report* r);
double dislocate_report_total(const dislocate_report* r);
/* term: "log", "regular", "k_self", "cross", "pair", "error". */
dislocate_status dislocate_report_term(const dislocate_report* r, const char* term,
                                       double* out);
/* CSV row (header via dislocate_report_csv_header). Returns the number of
 * bytes that would be written; truncates to size. */
size_t dislocate_report_csv_row(const dislocate_report* r, char* buf, size_t size);
size_t dislocate_report_csv_header(char* buf, size_t size);

/* ---------- landscape ---------- */

/* Evaluates the limit functional for one dislocation on a polar grid
 * (nr radii x ntheta angles, cell centers); writes nr*ntheta energies in
 * row-major (radius-major) order. Infinite cells are +inf. */
dislocate_status dislocate_landscape(const dislocate_domain* d, const dislocate_datum* datum,
                                     int nr, int ntheta, double rel_tol, double* out);

/* ---------- optimization ---------- */

typedef struct dislocate_result dislocate_result;

dislocate_status dislocate_ngon_sweep(const dislocate_domain* d,
                                      const dislocate_datum* datum, int n,
                                      const double* radii, size_t nradii, double radius_tol,
                                      double rel_tol, dislocate_result** out);
dislocate_status dislocate_minimize(const dislocate_domain* d, const dislocate_datum* datum,
                                    int n, int starts, uint64_t seed, double rel_tol,
                                    dislocate_result** out);
void dislocate_result_free(dislocate_result* r);
double dislocate_result_energy(const dislocate_result* r);
long dislocate_result_evaluations(const dislocate_result* r);
int dislocate_result_converged(const dislocate_result* r);
dislocate_status dislocate_result_points(const dislocate_result* r, double* xy,
                                         size_t capacity, size_t* written);

/* ---------- coarsening ---------- */

typedef struct dislocate_trace dislocate_trace;

dislocate_status dislocate_coarsen(const dislocate_domain* d, const dislocate_config* c,
                                   double eps, dislocate_trace** out);
void dislocate_trace_free(dislocate_trace* t);
size_t dislocate_trace_steps(const dislocate_trace* t);
/* action: 0 merge, 1 project, 2 relabel. */
dislocate_status dislocate_trace_step(const dislocate_trace* t, size_t i, int* action,
                                      double* s_hat, double* eta_after);
double dislocate_trace_final_eta(const dislocate_trace* t);
dislocate_status dislocate_trace_final_points(const dislocate_trace* t, double* xy,
                                              int* mult, size_t capacity, size_t* written);

/* ---------- selftest ---------- */

/* Runs the invariant suites, printing one line per suite to stdout; returns
 * DISLOCATE_OK iff all pass. */
dislocate_status dislocate_selftest(void);

#ifdef __cplusplus
}
#endif

#endif /* DISLOCATE_H */
