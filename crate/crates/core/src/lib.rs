//! Numerical toolkit for the closed-MEMS equation
//!
//! ```text
//!     -Δu = λ / (a - u)^p   in Ω,     0 < u < a in Ω,     u = 0 on ∂Ω,
//! ```
//!
//! where the ground-plate profile `a` vanishes at the boundary like `ρ^γ` and
//! `ρ = min{1/2, dist(x, ∂Ω)}`.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: domains, uniform grids, boundary distance, weights `ϱ_τ`.
//! - [`operators`]: the discrete Dirichlet Laplacian (an M-matrix), its Green
//!   operator, and the smallest eigenvalue of `-Δ - diag(w)`.
//! - [`membrane`]: ground-plate profiles and the monotone iteration that
//!   produces the minimal solution.
//! - [`analysis`]: pull-in voltage bracketing, stability, sweeps, boundary
//!   decay fits, extremal probes and the closed-form regime classifier.
//! - [`cli_io`]: run configuration, CSV emission and the command driver used
//!   by the `mems` binary.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli_io;
pub mod error;
pub mod geometry;
pub mod membrane;
pub mod operators;

pub use error::{Error, Result};
