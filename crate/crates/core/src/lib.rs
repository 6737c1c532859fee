//! Bayesian optimization with dimension scheduling.
//!
//! Classical BO fits one Gaussian process to every observation and pays a
//! cubic solve per iteration. Dimension scheduling instead samples a small
//! coordinate subset each iteration (weighted by principal-component
//! importance of the observed points), optimizes Expected Improvement over
//! that subset with the other coordinates pinned at the incumbent, and keeps
//! one small GP per subset. The crate provides both loops, a parallel
//! manager/worker variant, the supporting numerics (Cholesky, symmetric
//! eigendecomposition, DIRECT), benchmark and ODE-fitting objectives, and a
//! campaign harness that writes traces, summaries and SVG plots.
//!
//! ```no_run
//! use dimsched::objectives::benchmark;
//! use dimsched::optimize::{run_dsa, RunConfig};
//!
//! let spec = benchmark("styblinski_tang", 10).unwrap();
//! let cfg = RunConfig { max_iter: 100, ..RunConfig::default() };
//! let result = run_dsa(|x: &[f64]| spec.eval(x), &spec.bounds, &cfg).unwrap();
//! println!("best {} at {:?}", result.incumbent.y, result.incumbent.x);
//! ```

// NaN-rejecting `!(x > 0.0)` checks and index loops over matrices are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod acquisition;
pub mod direct;
pub mod gp;
pub mod harness;
pub mod numerics;
pub mod objectives;
pub mod optimize;
pub mod scheduler;
