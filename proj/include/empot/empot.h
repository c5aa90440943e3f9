/* C interface to the empot library. All functions return an empot_status;
 * on failure empot_last_error() describes the problem (thread-local, valid
 * until the next call on the same thread). Objects are opaque handles owned
 * by the caller and released with the matching *_free function. */
#ifndef EMPOT_EMPOT_H
#define EMPOT_EMPOT_H

#include <stddef.h>
#include <stdint.h>

#if defined(EMPOT_BUILDING_LIBRARY)
#define EMPOT_API __attribute__((visibility("default")))
#else
#define EMPOT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum empot_status {
  EMPOT_OK = 0,
  EMPOT_ERR_INVALID_ARGUMENT = 1,
  EMPOT_ERR_DOMAIN = 2,
  EMPOT_ERR_IO = 3,
  EMPOT_ERR_SOLVER = 4,
  EMPOT_ERR_BUDGET_EXHAUSTED = 5,
  EMPOT_ERR_CHECK_FAILED = 6,
  EMPOT_ERR_INTERNAL = 99
} empot_status;

EMPOT_API const char* empot_version(void);
EMPOT_API const char* empot_last_error(void);
EMPOT_API const char* empot_status_name(empot_status status);

/* ---- measures ---------------------------------------------------------- */

typedef struct empot_measure empot_measure;

/* coords is n*dim row-major; weights may be NULL for uniform 1/n. */
EMPOT_API empot_status empot_measure_create(size_t n, size_t dim, const double* coords,
                                            const double* weights, empot_measure** out);
/* .json or .csv file. */
EMPOT_API empot_status empot_measure_load(const char* path, empot_measure** out);
EMPOT_API empot_status empot_measure_save(const empot_measure* mu, const char* path);
EMPOT_API size_t empot_measure_size(const empot_measure* mu);
EMPOT_API size_t empot_measure_dim(const empot_measure* mu);
/* Copies atom i into point[dim] and its weight into *weight (either may be NULL). */
EMPOT_API empot_status empot_measure_atom(const empot_measure* mu, size_t i, double* point,
                                          double* weight);
EMPOT_API void empot_measure_free(empot_measure* mu);

/* Uniform empirical measure on n draws of a distribution spec such as
 * "uniform:d=4", "gaussian:d=4", "heavy:d=3,q=4", "poly:b0=1", "exp:gamma0=2". */
EMPOT_API empot_status empot_sample(const char* distribution, size_t n, uint64_t seed,
                                    empot_measure** out);

/* ---- transport plans ---------------------------------------------------- */

typedef struct empot_plan empot_plan;

EMPOT_API size_t empot_plan_edges(const empot_plan* plan);
EMPOT_API empot_status empot_plan_edge(const empot_plan* plan, size_t k, size_t* source,
                                       size_t* target, double* mass);
/* sum mass * |x - y|^p */
EMPOT_API double empot_plan_cost(const empot_plan* plan);
EMPOT_API void empot_plan_free(empot_plan* plan);

/* Exact W_p. plan may be NULL. */
EMPOT_API empot_status empot_wp(const empot_measure* mu, const empot_measure* nu, double p,
                                double* distance, empot_plan** plan);
/* Enumerates all assignments; equal-weight measures of the same size <= 8. */
EMPOT_API empot_status empot_brute_force_wp(const empot_measure* mu, const empot_measure* nu,
                                            double p, double* distance);

typedef struct empot_multiscale_summary {
  double plan_cost;      /* sum mass * |x - y|^p of the constructed coupling */
  double certified_cost; /* upper bound on plan_cost */
  double residual_cost;  /* part of the plan moving mass between layers */
  double eta;            /* mass moved between layers */
  int layers;
} empot_multiscale_summary;

/* Telescoped multiscale coupling over rho-layers ("euclidean", "poly:b=1",
 * "exp:gamma=2"), covers from oracle "greedy" or "grid", ell_star levels.
 * plan may be NULL. */
EMPOT_API empot_status empot_multiscale(const empot_measure* mu, const empot_measure* nu,
                                        const char* rho, const char* oracle, int ell_star,
                                        double p, empot_multiscale_summary* summary,
                                        empot_plan** plan);

/* ---- metric entropy ----------------------------------------------------- */

/* log bar_N(l); dim is the dimension for the Euclidean gauge. */
EMPOT_API empot_status empot_log_bar_n(const char* rho, int ell, size_t dim, double* out);
EMPOT_API empot_status empot_ellipsoid_entropy_lower(double gamma, double eps, double* out);
EMPOT_API empot_status empot_ellipsoid_entropy_upper(double gamma, double eps, double* out);
EMPOT_API empot_status empot_projection_entropy_lower(const char* rho, double eps, size_t dim,
                                                      double* out);
/* Greedy eps-packing of {rho <= 1}; *reached is 1 when target points were
 * found. The result is uniform on the packing. */
EMPOT_API empot_status empot_greedy_packing(const char* rho, double eps, size_t target,
                                            uint64_t seed, size_t budget, size_t dim,
                                            empot_measure** out, int* reached);

/* ---- bounds ------------------------------------------------------------- */

EMPOT_API empot_status empot_bernstein_tail(double sigma2, double M, double t, double* out);
/* Two-sided Bernstein-type bound for W_p(muhat, mu) from moment constants (s, V). */
EMPOT_API empot_status empot_wasserstein_mean_tail(double s, double V, double n, double p,
                                                   double t, double* out);
EMPOT_API empot_status empot_orlicz_norm(const double* samples, size_t count, double alpha,
                                         double* out);
/* General bound on E W_p^p(muhat, mu) with barN from empot_log_bar_n(rho, ., dim);
 * j_max < 0 and c_pq <= 0 select defaults. */
EMPOT_API empot_status empot_general_bound(double p, double q, double M_q, int ell_star,
                                           double n, const char* rho, size_t dim, int j_max,
                                           double c_pq, double* out);
EMPOT_API empot_status empot_euclidean_reference_rate(double p, double q, size_t d, double n,
                                                      double* out);

/* ---- experiments -------------------------------------------------------- */

typedef struct empot_report empot_report;

/* Config JSON mirrors the C++ config structs (see README). */
EMPOT_API empot_status empot_run_rate(const char* config_json, empot_report** out);
EMPOT_API empot_status empot_run_lower_bound(const char* config_json, empot_report** out);
EMPOT_API empot_status empot_run_concentration(const char* config_json, empot_report** out);

/* 1 when the experiment's own check passed. */
EMPOT_API int empot_report_passed(const empot_report* report);
EMPOT_API empot_status empot_report_summary(const empot_report* report, const char* key,
                                            double* out);
/* format "csv", "json" or "svg"; *text is released with empot_string_free. */
EMPOT_API empot_status empot_report_render(const empot_report* report, const char* format,
                                           char** text);
/* Writes <dir>/<stem>.<ext> for each comma-separated format. */
EMPOT_API empot_status empot_report_emit(const empot_report* report, const char* dir,
                                         const char* stem, const char* formats);
EMPOT_API void empot_report_free(empot_report* report);
EMPOT_API void empot_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif
