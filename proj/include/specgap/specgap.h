/* specgap - persistence probabilities of stationary Gaussian processes with
 * a spectral gap: Monte Carlo estimation, certified upper bounds from
 * positive-coefficient polynomial certificates, and the matching lower-bound
 * construction.
 *
 * C interface over the C++ core. All functions return SG_OK (0) on success
 * or an error code; sg_last_error() describes the most recent failure on the
 * calling thread. Strings returned through char** are owned by the caller
 * and must be released with sg_string_free().
 */

#ifndef SPECGAP_H
#define SPECGAP_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define SG_OK 0
#define SG_ERR_INTERNAL 1
#define SG_ERR_INVALID 2 /* bad input or precondition */
#define SG_ERR_NUMERIC 3 /* numerical defect signal */

/* Opaque symmetric spectral measure handle. */
typedef struct sg_measure sg_measure;

const char* sg_version(void);
const char* sg_last_error(void);
void sg_string_free(char* s);

/* Parse a measure document:
 *   {"atoms":[{"freq":f,"mass":m},...],
 *    "density":[{"from":a,"to":b,"height":h},...]}
 * (positive half-line only; symmetrization is implicit). */
int sg_measure_parse(const char* json_text, sg_measure** out);
/* The discrete gap measure used by the sharpness construction. */
int sg_measure_example(int n_max, sg_measure** out);
void sg_measure_free(sg_measure* m);

/* total mass, gap radius, support radius, component counts (JSON). */
int sg_measure_info(const sg_measure* m, char** json_out);
int sg_measure_to_json(const sg_measure* m, char** json_out);
int sg_covariance(const sg_measure* m, double x, double* out);
int sg_gap_radius(const sg_measure* m, double* out);

/* P{g1 >= 0, g2 >= 0} for standard bivariate normals with correlation rho. */
int sg_orthant_probability(double rho, double* out);

/* One realization on the grid x0 + j*step, j = 0..count-1, written to
 * values_out (caller-allocated, length count). */
int sg_sample_path(const sg_measure* m, double x0, double step, int64_t count,
                   uint64_t seed, double* values_out);

/* Monte Carlo estimate of P{f >= 0 on the grid 0, step, ..., <= L}.
 * Deterministic in seed independent of threads (0 = auto). */
int sg_mc_persistence(const sg_measure* m, double L, double step,
                      int64_t trials, uint64_t seed, int threads,
                      char** json_out);

/* Common-random-numbers sweep over L_values (ascending recommended). */
int sg_mc_sweep(const sg_measure* m, const double* L_values, int count,
                double step, int64_t trials, uint64_t seed, int threads,
                char** json_out);

/* Single-band certificate for a measure supported in (1/4, 1/2]. */
int sg_certify_band(const sg_measure* m_unit, int n, char** json_out);

/* Dyadic-band assembly of the certified upper bound on
 * P{f >= 0 on [0, L]}; reports min(raw, 1/2). When L is too small for the
 * certificate machinery the trace records the trivial bound 1/2. */
int sg_certify(const sg_measure* m, double delta, double L, double c_pp,
               int discrete, char** json_out);

/* Lower-bound trace for a measure supported in [-R, R] satisfying the
 * rho_n >= e^{-C n} sqrt(mass) condition. Magnitudes live in log10. */
int sg_lower_bound(double C, double L, double R, char** json_out);

/* Tables of rho_n^2 (n = 0..n_max) and sigma^2(N) (N = 0..N_max). */
int sg_rho_table(const sg_measure* m, int n_max, char** json_out);
int sg_sigma_table(const sg_measure* m, int N_max, char** json_out);

/* Lagrange-interpolation verification of rho_n >= 10^{-3n} on the example
 * measure. */
int sg_lagrange_report(int n, int n_max, char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* SPECGAP_H */
