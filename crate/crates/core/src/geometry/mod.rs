//! Metrics on coordinate patches of ℝⁿ, their Christoffel symbols and
//! Riemann curvature, plus constructive flatness checks.
//!
//! The curvature convention is fixed to
//!
//! ```text
//! R(∂_k, ∂_l) ∂_j = Σ_i R^i_jkl ∂_i
//! R^i_jkl = ∂_l Γ^i_kj − ∂_k Γ^i_lj + Σ_m Γ^i_lm Γ^m_kj − Σ_m Γ^i_km Γ^m_lj
//! ```
//!
//! which is the negative of the other widespread convention: for the unit
//! sphere `diag(1, sin²θ)` this gives `R^1_212 = −sin²θ`.

mod curvature;
mod geodesic;
mod isometry;
mod metric;
mod quad;
mod scan;
mod spec;

use std::ops::Deref;

use serde::Serialize;

pub use curvature::{
    christoffel_diagonal, christoffel_general, riemann, ChristoffelValues, CurvatureMode, RiemannValues,
};
pub use geodesic::geodesic_integrate;
pub use isometry::{isometry_jacobian, isometry_map, ISOMETRY_ABS_TOL};
pub use metric::{AnyMetric, DiagonalMetric, GeneralMetric, Metric};
pub use quad::integrate_adaptive;
pub use scan::{flatness_scan, Grid, ScanReport};
pub use spec::MetricSpec;

/// Coordinates `(x_1, …, x_n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: impl Into<Vec<f64>>) -> Self {
        Point(coords.into())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Copy with coordinate `axis` moved by `delta`.
    pub fn shifted(&self, axis: usize, delta: f64) -> Point {
        let mut c = self.0.clone();
        c[axis] += delta;
        Point(c)
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}
