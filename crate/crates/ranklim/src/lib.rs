//! Simulation and verification toolkit for generalized PageRank on
//! scale-free directed random graphs.
//!
//! The crate covers the full pipeline:
//!
//! * [`graphgen`] — samples Pareto-type vertex attributes and materializes
//!   directed configuration model (DCM) or inhomogeneous random digraph
//!   (IRD) realizations.
//! * [`pagerank`] — truncated power iteration for the scale-free rank
//!   vector `R = Q Σ Mᵏ`, with a rigorous geometric iteration-error bound.
//! * [`branching`] — the limiting marked branching-process laws, the
//!   population-dynamics solver for the fixed point `X = CQ + Σ C Xⱼ`,
//!   and samplers for the limit rank `R*`.
//! * [`stats`] — empirical-distribution utilities: exact Wasserstein-1,
//!   Hill tail-index estimation, and tail-ratio diagnostics.
//! * [`experiments`] — config-driven studies: the Venn overlap experiment,
//!   the distributional-convergence check, and the tail study.
//! * [`cli`] — the `ranklim` binary dispatching all of the above.
//!
//! All randomness flows from a single master seed through [`rng::StreamKey`],
//! so every artifact is bit-reproducible.

pub mod branching;
pub mod cli;
pub mod experiments;
pub mod graphgen;
pub mod pagerank;
pub mod rng;
pub mod stats;
