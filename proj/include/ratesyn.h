/* ratesyn C API: convergence-rate certification and synthesis for
 * first-order optimization algorithms and extremum controllers.
 *
 * All functions return rs_status; RS_OK means success and RS_INFEASIBLE is
 * the (non-error) negative answer of a feasibility question. Objects are
 * opaque handles released with the matching _free function. Strings returned
 * through char** are heap-allocated and released with rs_string_free.
 * rs_last_error() describes the most recent failure on the calling thread.
 */
#ifndef RATESYN_H
#define RATESYN_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  RS_OK = 0,
  RS_INFEASIBLE = 1,
  RS_INCONCLUSIVE = 2,
  RS_ERR_INVALID_ARGUMENT = 10,
  RS_ERR_DIMENSION = 11,
  RS_ERR_SINGULAR = 12,
  RS_ERR_SOLVER = 13,
  RS_ERR_JSON = 14,
  RS_ERR_INTERNAL = 15
} rs_status;

typedef struct rs_system rs_system;
typedef struct rs_algorithm rs_algorithm;
typedef struct rs_certificate rs_certificate;
typedef struct rs_options rs_options;

const char* rs_version(void);
const char* rs_last_error(void);
void rs_string_free(char* s);

/* ---- options ------------------------------------------------------- */

rs_options* rs_options_new(void);
void rs_options_free(rs_options* opts);
/* Keys: tol_feas, tol_bisect, tol_schur, rank_rtol, var_bound, margin_cap,
 * max_iterations, iqc_horizon, sim_horizon. */
rs_status rs_options_set(rs_options* opts, const char* key, double value);

/* ---- state-space systems ------------------------------------------- */

rs_status rs_system_from_json(const char* json, rs_system** out);
rs_status rs_system_to_json(const rs_system* sys, char** out);
void rs_system_free(rs_system* sys);

/* ---- algorithm realizations ---------------------------------------- */

rs_status rs_algorithm_from_json(const char* json, rs_algorithm** out);
rs_status rs_algorithm_to_json(const rs_algorithm* alg, char** out);
void rs_algorithm_free(rs_algorithm* alg);
rs_status rs_algorithm_dims(const rs_algorithm* alg, int* states, int* d);

/* name: gradient_descent | heavy_ball | nesterov | triple_momentum.
 * alpha/beta are ignored where a name does not use them. */
rs_status rs_catalog(const char* name, double m, double L, double alpha, double beta,
                     int d, rs_algorithm** out);

/* Verify the integrator structure of a loop system and factor it. */
rs_status rs_structure_check(const rs_system* sys, rs_algorithm** out);

/* ---- certificates --------------------------------------------------- */

rs_status rs_certificate_to_json(const rs_certificate* cert, char** out);
double rs_certificate_rho(const rs_certificate* cert);
void rs_certificate_free(rs_certificate* cert);

/* ---- analysis and synthesis ----------------------------------------- */

rs_status rs_optimal_rate(double m, double L, int ell, double* rho_out);

/* full_class: 0 repeated, 1 full. RS_INFEASIBLE when not certifiable. */
rs_status rs_certify(const rs_algorithm* alg, double m, double L, double rho, int ell,
                     int full_class, const rs_options* opts, rs_certificate** cert_out);

rs_status rs_bisect_rate(const rs_algorithm* alg, double m, double L, int ell,
                         int full_class, const rs_options* opts, double* rho_out,
                         rs_certificate** cert_out);

/* Bisection over the eliminated design test (design achievability). */
rs_status rs_design_rate(double m, double L, int ell, int full_class,
                         const rs_options* opts, double* rho_out);

rs_status rs_synthesize(double m, double L, double rho, int ell, int full_class, int d,
                        const rs_options* opts, rs_algorithm** alg_out,
                        rs_certificate** cert_out);

/* Monte-Carlo simulation summary as JSON:
 * {"rho_hat_max":..,"rho_hat_med":..,"divergences":..}. */
rs_status rs_simulate(const rs_algorithm* alg, double m, double L, int seeds, int horizon,
                      unsigned base_seed, const rs_options* opts, char** json_out);

/* plant_spec: "delay:<nu>" | "pole_family:<p>" | "mimo_sex3" | a JSON object
 * {"g1": <system>, "g2": <system, optional>}. rho <= 0 requests bisection.
 * Result row JSON: {"example","param","kappa","ell","rho_star","status",
 * "margin"}. */
rs_status rs_extremum(const char* plant_spec, double m, double L, double rho, int ell,
                      const rs_options* opts, char** json_out);

/* CSV sweep over a named example family; header
 * example,param,kappa,ell,rho_star,status,margin. Lists are comma separated. */
rs_status rs_sweep_csv(const char* example, const char* params, const char* kappas,
                       const char* ells, const rs_options* opts, char** csv_out);

/* Solver-agnostic dump of the certification problem for an algorithm. */
rs_status rs_dump_lmi(const rs_algorithm* alg, double m, double L, double rho, int ell,
                      int full_class, const rs_options* opts, char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* RATESYN_H */
