//! C ABI for the ranklim toolkit.
//!
//! Conventions:
//!
//! * every object crossing the boundary is an opaque handle created by an
//!   `rl_*` constructor and released by the matching `rl_*_free`;
//! * fallible calls return [`RlStatus`]; on failure the thread-local
//!   message from [`rl_last_error`] describes what went wrong;
//! * array views borrowed from a handle (`rl_*_data`) stay valid until the
//!   handle is freed;
//! * all randomness is seeded: same seed, same bytes, on every platform.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use ranklim::branching::{
    population_dynamics, sample_r_star, BranchingLaw, FixedPointPool,
};
use ranklim::graphgen::{
    build_dcm, build_ird, read_graph, sample_attributes, write_graph, AttributeKind,
    AttributeSequenceConfig, DcmBuild, DcmMode, Dependence, DiGraph, GraphHeader,
};
use ranklim::pagerank::{compute_pagerank, iteration_error_bound, RankVector};
use ranklim::rng::StreamKey;
use ranklim::stats::{hill_index, wasserstein1, EmpiricalDistribution};

/// Status code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RlStatus {
    Ok = 0,
    InvalidArgument = 1,
    RuntimeError = 2,
}

/// Graph model selector.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RlModel {
    Dcm = 0,
    Ird = 1,
}

/// DCM pairing variant.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RlDcmMode {
    Multigraph = 0,
    Repeated = 1,
    Erased = 2,
}

/// In/out dependence of the attribute sampler.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RlDependence {
    Independent = 0,
    PowerCoupled = 1,
}

/// Opaque directed-graph handle.
pub struct RlGraph(DiGraph);
/// Opaque rank-vector handle.
pub struct RlRanks(RankVector);
/// Opaque branching-law handle.
pub struct RlLaw(BranchingLaw);
/// Opaque fixed-point-pool handle.
pub struct RlPool(FixedPointPool);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

/// Message for the most recent failure on this thread; empty when the last
/// call succeeded. The pointer stays valid until the next failing call on
/// the same thread.
#[no_mangle]
pub extern "C" fn rl_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Crate version as a static C string.
#[no_mangle]
pub extern "C" fn rl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

fn guard<F: FnOnce() -> Result<(), (RlStatus, String)>>(body: F) -> RlStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => RlStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            RlStatus::RuntimeError
        }
    }
}

fn invalid<T: std::fmt::Display>(e: T) -> (RlStatus, String) {
    (RlStatus::InvalidArgument, e.to_string())
}

fn runtime<T: std::fmt::Display>(e: T) -> (RlStatus, String) {
    (RlStatus::RuntimeError, e.to_string())
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), (RlStatus, String)> {
    if out.is_null() {
        return Err(invalid("output pointer is null"));
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

fn attr_config(
    n: u64,
    alpha: f64,
    b: f64,
    beta: f64,
    c_scale: f64,
    dependence: RlDependence,
    damping: f64,
) -> AttributeSequenceConfig {
    AttributeSequenceConfig {
        n: n as usize,
        alpha,
        b,
        beta,
        c_scale,
        dependence: match dependence {
            RlDependence::Independent => Dependence::Independent,
            RlDependence::PowerCoupled => Dependence::PowerCoupled,
        },
        q_value: 1.0 - damping,
        zeta_value: damping,
        damping,
    }
}

/// Generate a graph. `theta_analytic = false` uses the empirical mean of
/// `W^- + W^+` in the IRD kernel.
///
/// # Safety
/// `out_graph` must be a valid pointer to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_graph_generate(
    model: RlModel,
    dcm_mode: RlDcmMode,
    n: u64,
    alpha: f64,
    b: f64,
    beta: f64,
    c_scale: f64,
    dependence: RlDependence,
    damping: f64,
    theta_analytic: bool,
    seed: u64,
    out_graph: *mut *mut RlGraph,
) -> RlStatus {
    guard(|| {
        let cfg = attr_config(n, alpha, b, beta, c_scale, dependence, damping);
        cfg.validate().map_err(invalid)?;
        let key = StreamKey::new(seed);
        let graph = match model {
            RlModel::Dcm => {
                let attrs =
                    sample_attributes(&cfg, AttributeKind::DcmDegrees, &mut key.child(0).rng())
                        .map_err(runtime)?;
                let mode = match dcm_mode {
                    RlDcmMode::Multigraph => DcmMode::Multigraph,
                    RlDcmMode::Repeated => DcmMode::Repeated,
                    RlDcmMode::Erased => DcmMode::Erased,
                };
                match build_dcm(attrs, mode, &mut key.child(1).rng(), 100).map_err(runtime)? {
                    DcmBuild::Built(g) => g,
                    DcmBuild::AttemptsExhausted { attempts, .. } => {
                        return Err(runtime(format!(
                            "no simple pairing found in {attempts} attempts"
                        )))
                    }
                }
            }
            RlModel::Ird => {
                let attrs =
                    sample_attributes(&cfg, AttributeKind::IrdWeights, &mut key.child(0).rng())
                        .map_err(runtime)?;
                let theta = if theta_analytic {
                    cfg.analytic_theta()
                } else {
                    attrs.iter().map(|a| a.in_param + a.out_param).sum::<f64>()
                        / attrs.len() as f64
                };
                build_ird(attrs, theta, &mut key.child(1).rng()).map_err(runtime)?
            }
        };
        unsafe { write_out(out_graph, RlGraph(graph)) }
    })
}

/// # Safety
/// `graph` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rl_graph_free(graph: *mut RlGraph) {
    if !graph.is_null() {
        drop(unsafe { Box::from_raw(graph) });
    }
}

/// # Safety
/// `graph` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rl_graph_vertex_count(graph: *const RlGraph) -> u64 {
    unsafe { graph.as_ref() }.map_or(0, |g| g.0.vertex_count() as u64)
}

/// # Safety
/// `graph` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rl_graph_edge_count(graph: *const RlGraph) -> u64 {
    unsafe { graph.as_ref() }.map_or(0, |g| g.0.edge_count() as u64)
}

/// Write `{prefix}.edges.csv`, `{prefix}.attrs.csv`, `{prefix}.json`.
///
/// # Safety
/// `graph` must be a live handle and `prefix` a NUL-terminated UTF-8 path.
#[no_mangle]
pub unsafe extern "C" fn rl_graph_write_csv(
    graph: *const RlGraph,
    prefix: *const c_char,
) -> RlStatus {
    guard(|| {
        let graph = unsafe { graph.as_ref() }.ok_or_else(|| invalid("graph handle is null"))?;
        let prefix = unsafe { cstr_path(prefix) }?;
        let header = GraphHeader {
            model_tag: graph.0.model_tag(),
            n: graph.0.vertex_count(),
            edge_count: graph.0.edge_count(),
            seed: None,
            config: None,
            theta: None,
            manifest_digest: None,
        };
        write_graph(&prefix, &graph.0, &header).map_err(runtime)?;
        Ok(())
    })
}

/// Load a graph written by [`rl_graph_write_csv`] or the CLI.
///
/// # Safety
/// `prefix` must be a NUL-terminated UTF-8 path and `out_graph` writable.
#[no_mangle]
pub unsafe extern "C" fn rl_graph_read_csv(
    prefix: *const c_char,
    out_graph: *mut *mut RlGraph,
) -> RlStatus {
    guard(|| {
        let prefix = unsafe { cstr_path(prefix) }?;
        let (graph, _header) = read_graph(&prefix).map_err(runtime)?;
        unsafe { write_out(out_graph, RlGraph(graph)) }
    })
}

unsafe fn cstr_path(ptr: *const c_char) -> Result<std::path::PathBuf, (RlStatus, String)> {
    if ptr.is_null() {
        return Err(invalid("path is null"));
    }
    let s = unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|_| invalid("path is not valid UTF-8"))?;
    Ok(Path::new(s).to_path_buf())
}

/// Truncated power iteration with `iterations` sparse products.
///
/// # Safety
/// `graph` must be a live handle and `out_ranks` writable.
#[no_mangle]
pub unsafe extern "C" fn rl_pagerank(
    graph: *const RlGraph,
    damping: f64,
    iterations: u32,
    out_ranks: *mut *mut RlRanks,
) -> RlStatus {
    guard(|| {
        let graph = unsafe { graph.as_ref() }.ok_or_else(|| invalid("graph handle is null"))?;
        let ranks = compute_pagerank(&graph.0, damping, iterations).map_err(invalid)?;
        unsafe { write_out(out_ranks, RlRanks(ranks)) }
    })
}

/// # Safety
/// `ranks` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rl_ranks_free(ranks: *mut RlRanks) {
    if !ranks.is_null() {
        drop(unsafe { Box::from_raw(ranks) });
    }
}

/// # Safety
/// `ranks` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rl_ranks_len(ranks: *const RlRanks) -> u64 {
    unsafe { ranks.as_ref() }.map_or(0, |r| r.0.values.len() as u64)
}

/// Borrowed view of the rank values; valid until the handle is freed.
///
/// # Safety
/// `ranks` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rl_ranks_data(ranks: *const RlRanks) -> *const f64 {
    unsafe { ranks.as_ref() }.map_or(ptr::null(), |r| r.0.values.as_ptr())
}

/// # Safety
/// `ranks` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rl_ranks_iterations(ranks: *const RlRanks) -> u32 {
    unsafe { ranks.as_ref() }.map_or(0, |r| r.0.iterations)
}

/// # Safety
/// `ranks` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rl_ranks_residual_bound(ranks: *const RlRanks) -> f64 {
    unsafe { ranks.as_ref() }.map_or(f64::NAN, |r| r.0.residual_bound)
}

/// Geometric iteration-error bound `c^(k+1)/(1-c) * mean_abs_q`.
#[no_mangle]
pub extern "C" fn rl_iteration_error_bound(damping: f64, k: u32, mean_abs_q: f64) -> f64 {
    iteration_error_bound(damping, k, mean_abs_q)
}

/// Empirical DCM limit law from a graph's attribute table.
///
/// # Safety
/// `graph` must be a live handle and `out_law` writable.
#[no_mangle]
pub unsafe extern "C" fn rl_law_dcm_from_graph(
    graph: *const RlGraph,
    out_law: *mut *mut RlLaw,
) -> RlStatus {
    guard(|| {
        let graph = unsafe { graph.as_ref() }.ok_or_else(|| invalid("graph handle is null"))?;
        let law = BranchingLaw::from_dcm_attrs(graph.0.attrs()).map_err(invalid)?;
        unsafe { write_out(out_law, RlLaw(law)) }
    })
}

/// Empirical IRD limit law from a graph's attribute table; pass
/// `theta <= 0` to use the empirical mean of `W^- + W^+`.
///
/// # Safety
/// `graph` must be a live handle and `out_law` writable.
#[no_mangle]
pub unsafe extern "C" fn rl_law_ird_from_graph(
    graph: *const RlGraph,
    theta: f64,
    out_law: *mut *mut RlLaw,
) -> RlStatus {
    guard(|| {
        let graph = unsafe { graph.as_ref() }.ok_or_else(|| invalid("graph handle is null"))?;
        let attrs = graph.0.attrs();
        let theta = if theta > 0.0 {
            theta
        } else {
            attrs.iter().map(|a| a.in_param + a.out_param).sum::<f64>() / attrs.len() as f64
        };
        let law = BranchingLaw::from_ird_attrs(attrs, theta).map_err(invalid)?;
        unsafe { write_out(out_law, RlLaw(law)) }
    })
}

/// Exact analytic IRD limit law for Pareto-type weights.
///
/// # Safety
/// `out_law` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_law_ird_analytic(
    alpha: f64,
    b: f64,
    beta: f64,
    c_scale: f64,
    dependence: RlDependence,
    damping: f64,
    out_law: *mut *mut RlLaw,
) -> RlStatus {
    guard(|| {
        let cfg = attr_config(1, alpha, b, beta, c_scale, dependence, damping);
        let law = BranchingLaw::from_ird_config(&cfg).map_err(invalid)?;
        unsafe { write_out(out_law, RlLaw(law)) }
    })
}

/// # Safety
/// `law` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rl_law_free(law: *mut RlLaw) {
    if !law.is_null() {
        drop(unsafe { Box::from_raw(law) });
    }
}

/// Population dynamics for the fixed point `X = CQ + sum C X_j`.
///
/// # Safety
/// `law` must be a live handle and `out_pool` writable.
#[no_mangle]
pub unsafe extern "C" fn rl_population_dynamics(
    law: *const RlLaw,
    pool_size: u64,
    generations: u32,
    seed: u64,
    out_pool: *mut *mut RlPool,
) -> RlStatus {
    guard(|| {
        let law = unsafe { law.as_ref() }.ok_or_else(|| invalid("law handle is null"))?;
        let pool = population_dynamics(
            &law.0,
            pool_size as usize,
            generations,
            StreamKey::new(seed),
        )
        .map_err(runtime)?;
        unsafe { write_out(out_pool, RlPool(pool)) }
    })
}

/// # Safety
/// `pool` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rl_pool_free(pool: *mut RlPool) {
    if !pool.is_null() {
        drop(unsafe { Box::from_raw(pool) });
    }
}

/// # Safety
/// `pool` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rl_pool_len(pool: *const RlPool) -> u64 {
    unsafe { pool.as_ref() }.map_or(0, |p| p.0.samples.len() as u64)
}

/// Borrowed view of the pool samples; valid until the handle is freed.
///
/// # Safety
/// `pool` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rl_pool_data(pool: *const RlPool) -> *const f64 {
    unsafe { pool.as_ref() }.map_or(ptr::null(), |p| p.0.samples.as_ptr())
}

/// # Safety
/// `pool` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rl_pool_rho1(pool: *const RlPool) -> f64 {
    unsafe { pool.as_ref() }.map_or(f64::NAN, |p| p.0.rho1_estimate)
}

/// Draw `count` samples of `R* = Q_0 + sum_{j<=N_0} X_j` into a
/// caller-provided buffer (sorted ascending).
///
/// # Safety
/// `law` and `pool` must be live handles; `out_samples` must point to at
/// least `count` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rl_sample_r_star(
    law: *const RlLaw,
    pool: *const RlPool,
    count: u64,
    seed: u64,
    out_samples: *mut f64,
) -> RlStatus {
    guard(|| {
        let law = unsafe { law.as_ref() }.ok_or_else(|| invalid("law handle is null"))?;
        let pool = unsafe { pool.as_ref() }.ok_or_else(|| invalid("pool handle is null"))?;
        if out_samples.is_null() {
            return Err(invalid("output buffer is null"));
        }
        let dist = sample_r_star(&law.0, &pool.0, count as usize, StreamKey::new(seed))
            .map_err(runtime)?;
        let values = dist.sorted();
        unsafe { ptr::copy_nonoverlapping(values.as_ptr(), out_samples, values.len()) };
        Ok(())
    })
}

/// Exact Wasserstein-1 distance between two unsorted sample arrays.
///
/// # Safety
/// `a` and `b` must point to `a_len` / `b_len` readable doubles and `out`
/// to one writable double.
#[no_mangle]
pub unsafe extern "C" fn rl_wasserstein1(
    a: *const f64,
    a_len: u64,
    b: *const f64,
    b_len: u64,
    out: *mut f64,
) -> RlStatus {
    guard(|| {
        if a.is_null() || b.is_null() || out.is_null() {
            return Err(invalid("null pointer argument"));
        }
        let a = unsafe { std::slice::from_raw_parts(a, a_len as usize) };
        let b = unsafe { std::slice::from_raw_parts(b, b_len as usize) };
        let da = EmpiricalDistribution::new(a.to_vec()).map_err(invalid)?;
        let db = EmpiricalDistribution::new(b.to_vec()).map_err(invalid)?;
        unsafe { *out = wasserstein1(&da, &db) };
        Ok(())
    })
}

/// Hill tail-index estimate on the `k` largest order statistics.
///
/// # Safety
/// `data` must point to `len` readable doubles and `out_alpha` to one
/// writable double.
#[no_mangle]
pub unsafe extern "C" fn rl_hill_index(
    data: *const f64,
    len: u64,
    k: u64,
    out_alpha: *mut f64,
) -> RlStatus {
    guard(|| {
        if data.is_null() || out_alpha.is_null() {
            return Err(invalid("null pointer argument"));
        }
        let slice = unsafe { std::slice::from_raw_parts(data, len as usize) };
        let dist = EmpiricalDistribution::new(slice.to_vec()).map_err(invalid)?;
        let report = hill_index(&dist, k as usize).map_err(invalid)?;
        unsafe { *out_alpha = report.hill_index };
        Ok(())
    })
}
