//! Data-driven iterative learning control for linear time-invariant plants.
//!
//! A lifted map is identified from one offline input/output record through a denoised
//! Hankel representation, then used by projected gradient ILC (classical, fast, hybrid)
//! on the real plant under box input constraints.
//!
//! Runnable examples live in `examples/`: `simulate_lifted`, `identify_toy`,
//! `ilc_variants`, `bounds_diagnostics`, `batch_stats` and `case_study`.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod behave;
pub mod bench;
pub mod cli;
pub mod error;
pub mod ilc;
pub mod linalg;
pub mod lti;
pub mod signals;

pub use error::{Error, Result};
