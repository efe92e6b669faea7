use super::metric::{check_dim, Metric};
use super::Point;
use crate::error::{Error, Result};

fn acceleration<M: Metric + ?Sized>(metric: &M, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let gamma = metric.christoffel(&Point(x.to_vec()))?;
    let n = x.len();
    Ok((0..n)
        .map(|k| {
            let mut a = 0.0;
            for i in 0..n {
                for j in 0..n {
                    a -= gamma.get(k, i, j) * v[i] * v[j];
                }
            }
            a
        })
        .collect())
}

fn axpy(x: &[f64], h: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(a, b)| a + h * b).collect()
}

/// Integrates `ẍ^k + Γ^k_ij ẋ^i ẋ^j = 0` with classical fixed-step RK4.
///
/// The returned path holds `steps + 1` points starting at `x0`. If the
/// trajectory leaves the metric's domain the error carries the points
/// computed so far.
pub fn geodesic_integrate<M: Metric + ?Sized>(
    metric: &M,
    x0: &Point,
    v0: &[f64],
    duration: f64,
    steps: usize,
) -> Result<Vec<Point>> {
    let n = metric.dim();
    check_dim(n, x0)?;
    if v0.len() != n || v0.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("v0", format!("expected {n} finite components")));
    }
    if steps == 0 {
        return Err(Error::invalid("steps", "must be positive"));
    }
    if !duration.is_finite() {
        return Err(Error::invalid("duration", "must be finite"));
    }
    let h = duration / steps as f64;
    let mut x = x0.0.clone();
    let mut v = v0.to_vec();
    let mut path = vec![x0.clone()];
    for _ in 0..steps {
        let step = (|| -> Result<(Vec<f64>, Vec<f64>)> {
            let a1 = acceleration(metric, &x, &v)?;
            let (x2, v2) = (axpy(&x, 0.5 * h, &v), axpy(&v, 0.5 * h, &a1));
            let a2 = acceleration(metric, &x2, &v2)?;
            let (x3, v3) = (axpy(&x, 0.5 * h, &v2), axpy(&v, 0.5 * h, &a2));
            let a3 = acceleration(metric, &x3, &v3)?;
            let (x4, v4) = (axpy(&x, h, &v3), axpy(&v, h, &a3));
            let a4 = acceleration(metric, &x4, &v4)?;
            let nx = (0..n)
                .map(|i| x[i] + h / 6.0 * (v[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]))
                .collect();
            let nv = (0..n)
                .map(|i| v[i] + h / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]))
                .collect();
            Ok((nx, nv))
        })();
        match step {
            Ok((nx, nv)) if metric.christoffel(&Point(nx.clone())).is_ok() => {
                x = nx;
                v = nv;
                path.push(Point(x.clone()));
            }
            _ => {
                return Err(Error::DomainExit {
                    partial: path.into_iter().map(|p| p.0).collect(),
                    steps,
                })
            }
        }
    }
    Ok(path)
}
