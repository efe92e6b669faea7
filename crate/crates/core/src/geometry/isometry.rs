use super::metric::{check_dim, DiagonalMetric, Metric};
use super::quad::integrate_adaptive;
use super::Point;
use crate::error::{Error, Result};

/// Absolute accuracy of each mapped coordinate.
pub const ISOMETRY_ABS_TOL: f64 = 1e-10;

/// Map to Euclidean coordinates, `φ_i(x) = ∫_{base_i}^{x_i} ds / c_i(s)`.
///
/// Its Jacobian is `diag(1/c_i(x_i))`, so the pullback of the Euclidean
/// metric under `φ` is exactly the diagonal metric. `base` may sit on the
/// boundary of a coefficient's domain (e.g. `0` for `t^(1-α)`) as long as
/// the integral converges there.
pub fn isometry_map(metric: &DiagonalMetric, base: &Point, x: &Point) -> Result<Point> {
    let n = metric.dim();
    check_dim(n, base)?;
    check_dim(n, x)?;
    let mut out = Vec::with_capacity(n);
    for (i, coeff) in metric.coeffs().iter().enumerate() {
        let dom = coeff.domain();
        for (what, v) in [("base", base[i]), ("point", x[i])] {
            if !dom.contains_closed(v) {
                return Err(Error::domain(format!(
                    "{what} coordinate {v} on axis {} is outside [{}, {}]",
                    i + 1,
                    dom.lo,
                    dom.hi
                )));
            }
        }
        let phi = integrate_adaptive(|s| coeff.value(s).map(|c| 1.0 / c), base[i], x[i], ISOMETRY_ABS_TOL)?;
        out.push(phi);
    }
    Ok(Point(out))
}

/// Diagonal of the Jacobian of [`isometry_map`] at `x`.
pub fn isometry_jacobian(metric: &DiagonalMetric, x: &Point) -> Result<Vec<f64>> {
    check_dim(metric.dim(), x)?;
    metric
        .coeffs()
        .iter()
        .zip(x.iter())
        .map(|(c, &xi)| c.value(xi).map(|v| 1.0 / v))
        .collect()
}
