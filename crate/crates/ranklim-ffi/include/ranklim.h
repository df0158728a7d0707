/* C ABI for the ranklim toolkit. All handles are opaque; every fallible call returns an RlStatus and leaves a message for rl_last_error(). */

#ifndef RANKLIM_H
#define RANKLIM_H

/* Generated by cbindgen from ranklim-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum {
  RlStatus_Ok = 0,
  RlStatus_InvalidArgument = 1,
  RlStatus_RuntimeError = 2,
} RlStatus;

/**
 * Graph model selector.
 */
typedef enum {
  RlModel_Dcm = 0,
  RlModel_Ird = 1,
} RlModel;

/**
 * DCM pairing variant.
 */
typedef enum {
  RlDcmMode_Multigraph = 0,
  RlDcmMode_Repeated = 1,
  RlDcmMode_Erased = 2,
} RlDcmMode;

/**
 * In/out dependence of the attribute sampler.
 */
typedef enum {
  RlDependence_Independent = 0,
  RlDependence_PowerCoupled = 1,
} RlDependence;

/**
 * Opaque directed-graph handle.
 */
typedef struct RlGraph RlGraph;

/**
 * Opaque branching-law handle.
 */
typedef struct RlLaw RlLaw;

/**
 * Opaque fixed-point-pool handle.
 */
typedef struct RlPool RlPool;

/**
 * Opaque rank-vector handle.
 */
typedef struct RlRanks RlRanks;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread; empty when the last
 * call succeeded. The pointer stays valid until the next failing call on
 * the same thread.
 */
const char *rl_last_error(void);

/**
 * Crate version as a static C string.
 */
const char *rl_version(void);

/**
 * Generate a graph. `theta_analytic = false` uses the empirical mean of
 * `W^- + W^+` in the IRD kernel.
 *
 * # Safety
 * `out_graph` must be a valid pointer to writable storage for one pointer.
 */
RlStatus rl_graph_generate(RlModel model,
                           RlDcmMode dcm_mode,
                           uint64_t n,
                           double alpha,
                           double b,
                           double beta,
                           double c_scale,
                           RlDependence dependence,
                           double damping,
                           bool theta_analytic,
                           uint64_t seed,
                           RlGraph **out_graph);

/**
 * # Safety
 * `graph` must come from this library and not have been freed.
 */
void rl_graph_free(RlGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle.
 */
uint64_t rl_graph_vertex_count(const RlGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle.
 */
uint64_t rl_graph_edge_count(const RlGraph *graph);

/**
 * Write `{prefix}.edges.csv`, `{prefix}.attrs.csv`, `{prefix}.json`.
 *
 * # Safety
 * `graph` must be a live handle and `prefix` a NUL-terminated UTF-8 path.
 */
RlStatus rl_graph_write_csv(const RlGraph *graph, const char *prefix);

/**
 * Load a graph written by [`rl_graph_write_csv`] or the CLI.
 *
 * # Safety
 * `prefix` must be a NUL-terminated UTF-8 path and `out_graph` writable.
 */
RlStatus rl_graph_read_csv(const char *prefix, RlGraph **out_graph);

/**
 * Truncated power iteration with `iterations` sparse products.
 *
 * # Safety
 * `graph` must be a live handle and `out_ranks` writable.
 */
RlStatus rl_pagerank(const RlGraph *graph,
                     double damping,
                     uint32_t iterations,
                     RlRanks **out_ranks);

/**
 * # Safety
 * `ranks` must come from this library and not have been freed.
 */
void rl_ranks_free(RlRanks *ranks);

/**
 * # Safety
 * `ranks` must be a live handle.
 */
uint64_t rl_ranks_len(const RlRanks *ranks);

/**
 * Borrowed view of the rank values; valid until the handle is freed.
 *
 * # Safety
 * `ranks` must be a live handle.
 */
const double *rl_ranks_data(const RlRanks *ranks);

/**
 * # Safety
 * `ranks` must be a live handle.
 */
uint32_t rl_ranks_iterations(const RlRanks *ranks);

/**
 * # Safety
 * `ranks` must be a live handle.
 */
double rl_ranks_residual_bound(const RlRanks *ranks);

/**
 * Geometric iteration-error bound `c^(k+1)/(1-c) * mean_abs_q`.
 */
double rl_iteration_error_bound(double damping, uint32_t k, double mean_abs_q);

/**
 * Empirical DCM limit law from a graph's attribute table.
 *
 * # Safety
 * `graph` must be a live handle and `out_law` writable.
 */
RlStatus rl_law_dcm_from_graph(const RlGraph *graph, RlLaw **out_law);

/**
 * Empirical IRD limit law from a graph's attribute table; pass
 * `theta <= 0` to use the empirical mean of `W^- + W^+`.
 *
 * # Safety
 * `graph` must be a live handle and `out_law` writable.
 */
RlStatus rl_law_ird_from_graph(const RlGraph *graph, double theta, RlLaw **out_law);

/**
 * Exact analytic IRD limit law for Pareto-type weights.
 *
 * # Safety
 * `out_law` must be writable.
 */
RlStatus rl_law_ird_analytic(double alpha,
                             double b,
                             double beta,
                             double c_scale,
                             RlDependence dependence,
                             double damping,
                             RlLaw **out_law);

/**
 * # Safety
 * `law` must come from this library and not have been freed.
 */
void rl_law_free(RlLaw *law);

/**
 * Population dynamics for the fixed point `X = CQ + sum C X_j`.
 *
 * # Safety
 * `law` must be a live handle and `out_pool` writable.
 */
RlStatus rl_population_dynamics(const RlLaw *law,
                                uint64_t pool_size,
                                uint32_t generations,
                                uint64_t seed,
                                RlPool **out_pool);

/**
 * # Safety
 * `pool` must come from this library and not have been freed.
 */
void rl_pool_free(RlPool *pool);

/**
 * # Safety
 * `pool` must be a live handle.
 */
uint64_t rl_pool_len(const RlPool *pool);

/**
 * Borrowed view of the pool samples; valid until the handle is freed.
 *
 * # Safety
 * `pool` must be a live handle.
 */
const double *rl_pool_data(const RlPool *pool);

/**
 * # Safety
 * `pool` must be a live handle.
 */
double rl_pool_rho1(const RlPool *pool);

/**
 * Draw `count` samples of `R* = Q_0 + sum_{j<=N_0} X_j` into a
 * caller-provided buffer (sorted ascending).
 *
 * # Safety
 * `law` and `pool` must be live handles; `out_samples` must point to at
 * least `count` writable doubles.
 */
RlStatus rl_sample_r_star(const RlLaw *law,
                          const RlPool *pool,
                          uint64_t count,
                          uint64_t seed,
                          double *out_samples);

/**
 * Exact Wasserstein-1 distance between two unsorted sample arrays.
 *
 * # Safety
 * `a` and `b` must point to `a_len` / `b_len` readable doubles and `out`
 * to one writable double.
 */
RlStatus rl_wasserstein1(const double *a,
                         uint64_t a_len,
                         const double *b,
                         uint64_t b_len,
                         double *out);

/**
 * Hill tail-index estimate on the `k` largest order statistics.
 *
 * # Safety
 * `data` must point to `len` readable doubles and `out_alpha` to one
 * writable double.
 */
RlStatus rl_hill_index(const double *data, uint64_t len, uint64_t k, double *out_alpha);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RANKLIM_H */
