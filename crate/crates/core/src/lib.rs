//! Local fractional derivatives and the geometry of the metrics they induce.
//!
//! A local fractional derivative is an operator `c_α(t) · d/dt` with a
//! positive coefficient `c_α`. Giving ℝ₊ⁿ the metric `Σ dx_i² / c_α(x_i)²`
//! makes the coordinate fields `c_α(x_i) ∂_i` orthonormal; this crate
//! computes that metric's Christoffel symbols and Riemann tensor and checks,
//! numerically and constructively, that the tensor vanishes for every
//! admissible coefficient and every order `α ∈ (0, 1]`.
//!
//! Modules:
//! - [`mittag_leffler`]: gamma, Pochhammer, truncated Mittag-Leffler series
//! - [`expr`]: coefficient expressions and order-2 jets
//! - [`fracderiv`]: the operators, their limit definition and the value at 0
//! - [`geometry`]: metrics, curvature, flatness scans, isometry and geodesics
//! - [`cli`]: the `fracgeom` command line

pub mod cli;
pub mod error;
pub mod expr;
pub mod fracderiv;
pub mod geometry;
pub mod mittag_leffler;
mod special;

pub use error::{Error, Result};
