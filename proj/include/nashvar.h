/* nashvar: Nash equilibria of VaR-constrained portfolio games in a complete
 * Black-Scholes market, behind a flat C API with opaque handles and integer
 * status codes. All functions return nv_status (0 on success); the most recent
 * error message per thread is available from nv_last_error(). Handles are
 * created by nv_*_create / solver calls and released with their nv_*_free.
 */
#ifndef NASHVAR_H
#define NASHVAR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NASHVAR_API __declspec(dllexport)
#else
#define NASHVAR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nv_status {
    NV_OK = 0,
    NV_ERR_INTERNAL = 1,
    NV_ERR_INVALID_CONFIG = 2,
    NV_ERR_NO_EQUILIBRIUM = 3,
    NV_ERR_INFEASIBLE = 4,
    NV_ERR_NO_CONVERGENCE = 5,
    NV_ERR_VERIFICATION_FAILED = 6,
    NV_ERR_INVALID_ARGUMENT = 7,
    NV_ERR_IO = 8
} nv_status;

typedef enum nv_case {
    NV_CASE_NO_EQUILIBRIUM = 0,
    NV_CASE_DEGENERATE_FAMILY = 1,
    NV_CASE_UNIQUE = 2,
    NV_CASE_FAMILY_FREE_SET = 3,
    NV_CASE_UNCONSTRAINED = 4,
    NV_CASE_POWER_A = 5,
    NV_CASE_POWER_B = 6,
    NV_CASE_INFEASIBLE = 7,
    NV_CASE_DISJOINT = 8,
    NV_CASE_PARTITION = 9,
    NV_CASE_BENCHMARK = 10
} nv_case;

typedef struct nv_law nv_law;       /* lognormal law of the state price density */
typedef struct nv_wealth nv_wealth; /* piecewise terminal wealth */
typedef struct nv_result nv_result; /* solver output */

NASHVAR_API const char* nv_version(void);
NASHVAR_API const char* nv_last_error(void);

/* ---- law ---- */
NASHVAR_API nv_status nv_law_create(double nu, double tau, nv_law** out);
/* sigma is row-major d x d; rejects singular volatility and zero market price
 * of risk. */
NASHVAR_API nv_status nv_law_from_market(const double* mu, const double* sigma, int d,
                                         double horizon, nv_law** out);
NASHVAR_API void nv_law_free(nv_law* law);
NASHVAR_API nv_status nv_law_params(const nv_law* law, double* nu, double* tau);
NASHVAR_API nv_status nv_law_cdf(const nv_law* law, double z, double* out);
NASHVAR_API nv_status nv_law_quantile(const nv_law* law, double p, double* out);
/* E[Z^q 1{lo < Z < hi}]; pass INFINITY for an unbounded hi. */
NASHVAR_API nv_status nv_law_truncated_power_moment(const nv_law* law, double q, double lo,
                                                    double hi, double* out);
/* c2 with P(c1 < Z < c2) = alpha; NV_ERR_INFEASIBLE when no such c2 exists. */
NASHVAR_API nv_status nv_law_interval_upper_bound(const nv_law* law, double c1, double alpha,
                                                  double* out);

/* ---- wealth ---- */
NASHVAR_API void nv_wealth_free(nv_wealth* w);
NASHVAR_API nv_status nv_wealth_num_cells(const nv_wealth* w, int* out);
NASHVAR_API nv_status nv_wealth_cell(const nv_wealth* w, int index, double* z_lo, double* z_hi,
                                     double* coeff, double* exponent);
NASHVAR_API nv_status nv_wealth_eval(const nv_wealth* w, double z, double* out);
NASHVAR_API nv_status nv_wealth_price(const nv_law* law, const nv_wealth* w, double* out);
NASHVAR_API nv_status nv_wealth_expected_utility(const nv_law* law, const nv_wealth* w,
                                                 double gamma, double* out);

/* ---- solvers ----
 * Game parameters follow the canonical two-agent layout: beta1 weighs agent
 * 1's wealth in agent 2's constraint P(X2 >= beta1 X1) >= alpha2. a2_interval
 * is NULL or {lo, hi} with probability alpha2.
 */
NASHVAR_API nv_status nv_solve_log2(const nv_law* law, double x01, double x02, double alpha1,
                                    double alpha2, double beta1, double beta2,
                                    const double* a2_interval, nv_result** out);
NASHVAR_API nv_status nv_solve_power2(const nv_law* law, double x01, double x02, double alpha1,
                                      double alpha2, double beta1, double beta2, double gamma,
                                      nv_result** out);
/* n-agent solvers; beta is row-major n x n with zero diagonal. */
NASHVAR_API nv_status nv_solve_disjoint(const nv_law* law, int n, const double* x0,
                                        const double* alpha, const double* beta, nv_result** out);
NASHVAR_API nv_status nv_solve_partition(const nv_law* law, int n, int m, const double* x0,
                                         const double* alpha, const double* beta, nv_result** out);
/* one-stock benchmark problem: beat beta * S_T with probability alpha. */
NASHVAR_API nv_status nv_solve_benchmark(double mu, double sigma, double horizon, double x0,
                                         double beta, double alpha, nv_result** out);

/* ---- results ---- */
NASHVAR_API void nv_result_free(nv_result* r);
NASHVAR_API nv_status nv_result_case(const nv_result* r, int* out);
NASHVAR_API nv_status nv_result_agent_count(const nv_result* r, int* out);
/* Returns a fresh wealth handle the caller frees. */
NASHVAR_API nv_status nv_result_wealth(const nv_result* r, int agent, nv_wealth** out);
/* Multiplier per agent: lambda2 for the two-agent games, lambda_i for the
 * n-agent ones, lambda for the benchmark. */
NASHVAR_API nv_status nv_result_lambda(const nv_result* r, int agent, double* out);
/* Free set / constraint set of an agent; hi may be INFINITY. Returns
 * NV_ERR_INVALID_ARGUMENT when the agent has no set. */
NASHVAR_API nv_status nv_result_set(const nv_result* r, int agent, double* lo, double* hi);
NASHVAR_API nv_status nv_result_iterations(const nv_result* r, int* out);
NASHVAR_API nv_status nv_result_residual(const nv_result* r, double* out);
NASHVAR_API nv_status nv_result_converged(const nv_result* r, int* out);

/* ---- scenarios (what the CLI wraps) ---- */
/* Runs a config file and writes summary/CSV/manifest outputs into out_dir.
 * seed >= 0 overrides the config seed; grid is NULL or "min:max:points". */
NASHVAR_API nv_status nv_run_scenario(const char* config_path, const char* out_dir,
                                      long long seed, const char* grid);
/* Re-solves and verifies a scenario; writes the textual report into `report`
 * (truncated to cap, always NUL-terminated). perturb_lambda_rel != 0 scales
 * the solved multipliers first (debug harness). */
NASHVAR_API nv_status nv_verify_scenario(const char* config_path, const char* out_dir,
                                         double perturb_lambda_rel, char* report, size_t cap);

/* ---- embedded example configs ---- */
NASHVAR_API int nv_example_count(void);
NASHVAR_API const char* nv_example_name(int index);
NASHVAR_API const char* nv_example_description(int index);
NASHVAR_API const char* nv_example_text(int index);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* NASHVAR_H */
