//! Two-sided bounds on the Jensen gap `E[φ(X)] − φ(E[X])`.
//!
//! The gap equals `E[h(X; μ)(X − μ)²]` with
//! `h(x; ν) = (φ(x) − φ(ν))/(x − ν)² − φ′(ν)/(x − ν)`, so the extrema of `h`
//! over the support times `var(X)` bound it on both sides. When `φ′` is
//! convex (concave) `h` is nondecreasing (nonincreasing) and the extrema sit
//! at the ends of the support.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod distributions;
pub mod error;
pub mod functions;
pub mod interval;
pub mod oracle;
pub mod partition;
pub mod quad;
pub mod samples;
pub mod search;

pub use error::{Error, Result};
